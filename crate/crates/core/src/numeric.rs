//! Small numerical kernels shared across modules: compensated products,
//! order-independent reductions and Gauss–Legendre rules.

impl std::ops::Add for TwoF64 {
    type Output = TwoF64;

    #[inline]
    fn add(self, o: TwoF64) -> TwoF64 {
        let s = two_sum(self.hi, o.hi);
        let lo = s.lo + self.lo + o.lo;
        quick_two_sum(s.hi, lo)
    }
}

impl std::ops::Neg for TwoF64 {
    type Output = TwoF64;

    #[inline]
    fn neg(self) -> TwoF64 {
        TwoF64 { hi: -self.hi, lo: -self.lo }
    }
}

impl std::ops::Sub for TwoF64 {
    type Output = TwoF64;

    #[inline]
    fn sub(self, o: TwoF64) -> TwoF64 {
        self + (-o)
    }
}

/// `√2` split as `SQRT2_HI + SQRT2_LO` to about 32 digits.
const SQRT2_HI: f64 = std::f64::consts::SQRT_2;
const SQRT2_LO: f64 = -9.667_293_313_452_913e-17;

/// A value represented as an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoF64 {
    pub hi: f64,
    pub lo: f64,
}

impl TwoF64 {
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        TwoF64 { hi: x, lo: 0.0 }
    }

    /// Exact conversion for integers up to 2^106 in magnitude.
    #[inline]
    pub fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        let lo = (n - hi as i128) as f64;
        two_sum(hi, lo)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Floor of the represented value.
    pub fn floor(self) -> f64 {
        let f = self.hi.floor();
        if f == self.hi {
            // hi is integral; the sign of lo decides.
            if self.lo < 0.0 {
                f - 1.0
            } else {
                f
            }
        } else {
            f
        }
    }
}

#[inline]
pub fn two_sum(a: f64, b: f64) -> TwoF64 {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    TwoF64 { hi: s, lo: err }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> TwoF64 {
    let s = a + b;
    TwoF64 { hi: s, lo: b - (s - a) }
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> TwoF64 {
    let p = a * b;
    TwoF64 { hi: p, lo: a.mul_add(b, -p) }
}

/// `R²` exactly.
#[inline]
pub fn square(r: f64) -> TwoF64 {
    two_prod(r, r)
}

/// `√2·R` to double-double accuracy.
#[inline]
pub fn sqrt2_times(r: f64) -> TwoF64 {
    let p = two_prod(SQRT2_HI, r);
    quick_two_sum(p.hi, p.lo + SQRT2_LO * r)
}

/// `R² - n` for an integer `n`, accurate to a few ulps of the result.
#[inline]
pub fn r2_minus_int(r: f64, n: i128) -> f64 {
    (square(r) - TwoF64::from_i128(n)).to_f64()
}

/// `R² - m/4` for an integer `m`; used with half-integer coordinates.
#[inline]
pub fn r2_minus_quarter(r: f64, m: i128) -> f64 {
    // m/4 is exact in binary once split.
    let q = TwoF64::from_i128(m);
    let q = TwoF64 { hi: q.hi * 0.25, lo: q.lo * 0.25 };
    (square(r) - q).to_f64()
}

/// Pairwise summation with a topology fixed by the slice length alone.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Reduces partial results with a balanced binary tree whose shape depends
/// only on `parts.len()`, never on how the parts were scheduled.
pub fn tree_reduce<T, F>(mut parts: Vec<T>, combine: F) -> Option<T>
where
    F: Fn(T, T) -> T,
{
    if parts.is_empty() {
        return None;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with an `n`-point Gauss–Legendre rule.
pub fn gauss_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    if b <= a {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in rule.0.iter().zip(&rule.1) {
        s += w * f(mid + half * x);
    }
    s * half
}

/// Formats `x` with 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let rule = gauss_legendre(16);
        let v = gauss_integrate(|x| x.powi(30) + 3.0 * x * x, -1.0, 2.0, &rule);
        let exact = (2f64.powi(31) + 1.0) / 31.0 + 9.0;
        assert!((v - exact).abs() / exact < 1e-13, "{v} vs {exact}");
        let wsum: f64 = rule.1.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn compensated_square_difference() {
        // (1e8 + 0.5)^2 - (1e16 + 1e8) = 0.25, far below f64 resolution at 1e16.
        let r = 1e8 + 0.5;
        assert_eq!(r2_minus_int(r, 10_000_000_100_000_000), 0.25);
        assert_eq!(r2_minus_quarter(r, 40_000_000_400_000_000), 0.25);
    }

    #[test]
    fn tree_reduce_shape_is_fixed() {
        let parts: Vec<f64> = (0..37).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let a = tree_reduce(parts.clone(), |x, y| x + y).unwrap();
        let b = tree_reduce(parts, |x, y| x + y).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(tree_reduce(Vec::<f64>::new(), |x, y| x + y).is_none());
    }

    #[test]
    fn floor_of_two_f64() {
        assert_eq!(TwoF64 { hi: 4.0, lo: -1e-20 }.floor(), 3.0);
        assert_eq!(TwoF64 { hi: 4.0, lo: 1e-20 }.floor(), 4.0);
        assert_eq!(TwoF64 { hi: 4.5, lo: -1e-20 }.floor(), 4.0);
    }
}
