use annulus_core::geometry::c0_constant;
use annulus_core::{enumerate_gamma, model, spectral, statistics, Error, GammaList, IntervalSpec};
use serde_json::json;

use crate::args::Command;
use crate::report::{key_values, num, table, Report};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit status 2.
    Validation(String),
    /// Anything else: exit status 1.
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ModelTruncation { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn gamma(radius: f64) -> Result<GammaList> {
    Ok(enumerate_gamma(radius)?)
}

fn need(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Validation(msg.into()))
    }
}

/// Runs an experiment command. `verify` and `golden` are handled elsewhere.
pub fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Gamma(r) => {
            let g = gamma(r.radius)?;
            let mut csv = Vec::new();
            g.write_csv(&mut csv).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(Report {
                json: json!({ "R": g.radius(), "K": g.k(), "calK": g.cal_k(), "points": g.points() }),
                csv: String::from_utf8(csv).expect("ascii"),
                summary: format!("R={} K={}", g.radius(), g.k()),
            })
        }
        Command::Areas(r) => {
            let g = gamma(r.radius)?;
            let s = statistics::area_series(&g);
            let csv = table(
                &["index", "x", "y", "r", "theta", "area"],
                g.points().iter().zip(&s.values).map(|(p, a)| {
                    vec![p.index.to_string(), p.point.x.to_string(), p.point.y.to_string(), num(p.r), num(p.theta), num(*a)]
                }),
            );
            Ok(Report {
                summary: format!("R={} K={}", g.radius(), g.k()),
                json: json!({ "R": g.radius(), "K": g.k(), "values": s.values }),
                csv,
            })
        }
        Command::Moments { r, k, l, pair_k } => {
            let g = gamma(r.radius)?;
            let s = statistics::area_series(&g);
            let (e, v) = statistics::expectation_variance(&s)?;
            let mut ck = Vec::new();
            for &kk in &k.0 {
                ck.push(json!({ "k": kk, "value": statistics::empirical_ck(&s, kk)?.value }));
            }
            let avg = statistics::ck_average(&s, *l)?;
            let full = IntervalSpec::full_radial();
            let count = statistics::pair_corr_count(&g, *pair_k, &full, &full, &IntervalSpec::full_circle())?;
            let c0 = c0_constant();
            let mut pairs = vec![
                ("R", num(g.radius())),
                ("K", g.k().to_string()),
                ("E", num(e)),
                ("V", num(v)),
                ("c0_ref", num(c0)),
            ];
            let ck_keys: Vec<String> = k.0.iter().map(|kk| format!("C_{kk}")).collect();
            for (key, item) in ck_keys.iter().zip(&ck) {
                pairs.push((key.as_str(), num(item["value"].as_f64().unwrap_or(f64::NAN))));
            }
            let avg_key = format!("avg_C_1..{l}");
            pairs.push((avg_key.as_str(), num(avg)));
            let pair_key = format!("pair_count_k{pair_k}");
            pairs.push((pair_key.as_str(), num(count)));
            Ok(Report {
                csv: key_values(&pairs),
                summary: format!("R={} E={e:.6} V={v:.6} (c0={c0:.9})", g.radius()),
                json: json!({
                    "R": g.radius(), "K": g.k(), "E": e, "V": v, "c0_ref": c0, "ck": ck,
                    "averages": [{ "L": l, "value": avg }],
                    "pair_tests": [{ "k": pair_k, "I1": full, "I2": full, "J": IntervalSpec::full_circle(), "count": count }],
                }),
            })
        }
        Command::Ck { r, k } => {
            let g = gamma(r.radius)?;
            let s = statistics::area_series(&g);
            let mut est = Vec::new();
            for &kk in &k.0 {
                est.push((kk, statistics::empirical_ck(&s, kk)?));
            }
            Ok(Report {
                summary: format!("R={} {} estimates, C_{}={:.6}", g.radius(), est.len(), est[0].0, est[0].1.value),
                csv: table(
                    &["k", "value", "stderr", "n"],
                    est.iter().map(|(kk, c)| vec![kk.to_string(), num(c.value), num(c.stderr), c.n.to_string()]),
                ),
                json: json!({
                    "R": g.radius(), "K": g.k(),
                    "estimates": est.iter().map(|(kk, c)| json!({ "k": kk, "value": c.value, "stderr": c.stderr, "n": c.n })).collect::<Vec<_>>(),
                }),
            })
        }
        Command::ModelCk { k, samples, seed } => {
            need(!k.0.is_empty(), "no k given")?;
            let est = model::model_ck_many(&k.0, *samples, *seed)?;
            let records: Vec<_> = k
                .0
                .iter()
                .zip(&est)
                .map(|(kk, c)| json!({ "k": kk, "n_samples": samples, "seed": seed, "estimate": c.value, "stderr": c.stderr }))
                .collect();
            Ok(Report {
                summary: format!("model C_{} = {:.6} ± {:.6}", k.0[0], est[0].value, est[0].stderr),
                csv: table(
                    &["k", "n_samples", "seed", "estimate", "stderr"],
                    k.0.iter().zip(&est).map(|(kk, c)| {
                        vec![kk.to_string(), samples.to_string(), seed.to_string(), num(c.value), num(c.stderr)]
                    }),
                ),
                json: json!({ "records": records }),
            })
        }
        Command::AvgCk { r, l } => {
            let g = gamma(r.radius)?;
            let s = statistics::area_series(&g);
            let avg = statistics::ck_average(&s, *l)?;
            Ok(Report {
                summary: format!("R={} L={l} average={avg:.6}", g.radius()),
                csv: key_values(&[("R", num(g.radius())), ("L", l.to_string()), ("average", num(avg))]),
                json: json!({ "R": g.radius(), "L": l, "average": avg }),
            })
        }
        Command::PairCorr { r, k, i1, i2, j } => {
            let g = gamma(r.radius)?;
            let count = statistics::pair_corr_count(&g, *k, i1, i2, j)?;
            let expected = i1.len() / 2f64.sqrt() * i2.len() / 2f64.sqrt() * j.len().min(annulus_core::TAU) / annulus_core::TAU;
            Ok(Report {
                summary: format!("R={} k={k} count={count:.6} expected={expected:.6}", g.radius()),
                csv: key_values(&[("R", num(g.radius())), ("k", k.to_string()), ("count", num(count)), ("expected", num(expected))]),
                json: json!({ "R": g.radius(), "k": k, "I1": i1, "I2": i2, "J": j, "count": count, "expected": expected }),
            })
        }
        Command::MixedCorr { r, k } => {
            let g = gamma(r.radius)?;
            let s = statistics::area_series(&g);
            let sum = statistics::mixed_corr_sum(&g, &s, *k)?;
            Ok(Report {
                summary: format!("R={} k={k} sum={sum:.6}", g.radius()),
                csv: key_values(&[("R", num(g.radius())), ("k", k.to_string()), ("sum", num(sum))]),
                json: json!({ "R": g.radius(), "k": k, "sum": sum }),
            })
        }
        Command::JointHist { r, k, bins } => {
            let g = gamma(r.radius)?;
            let h = statistics::pair_joint_hist(&g, *k, *bins)?;
            let b = *bins;
            let csv = table(
                &["r_bin", "theta_bin", "r2_bin", "count"],
                h.counts.iter().enumerate().map(|(i, c)| {
                    vec![(i / (b * b)).to_string(), (i / b % b).to_string(), (i % b).to_string(), c.to_string()]
                }),
            );
            let p = h.chi_square.map(|c| c.p_value);
            Ok(Report {
                summary: format!("R={} k={k} pairs={} p={}", g.radius(), h.pairs, p.map_or("n/a".into(), |p| format!("{p:.4}"))),
                json: json!({ "R": g.radius(), "histogram": h }),
                csv,
            })
        }
        Command::SectorVar { r, width, interval, grid, lambda_max } => {
            let g = gamma(r.radius)?;
            let width = width.unwrap_or_else(|| r.radius.powf(-0.95));
            let grid = grid.unwrap_or_else(|| spectral::default_grid(r.radius, width));
            let rep = spectral::sector_variance_report(&g, interval, width, grid, *lambda_max)?;
            let counts = spectral::sector_counts_on_grid(&g, interval, width, grid);
            let main = r.radius * width * interval.len();
            let csv = table(
                &["theta", "count", "deviation"],
                spectral::theta_grid(grid).zip(&counts).map(|(t, &n)| vec![num(t), n.to_string(), num(n as f64 - main)]),
            );
            Ok(Report {
                summary: format!("R={} width={width:.6e} empirical={:.6} predicted={:.6} ratio={:.4}", rep.radius, rep.empirical, rep.predicted, rep.ratio),
                json: json!({
                    "R": rep.radius, "width": rep.width, "I": rep.interval, "grid": rep.grid,
                    "empirical": rep.empirical, "predicted": rep.predicted, "ratio": rep.ratio, "D": rep.d,
                }),
                csv,
            })
        }
        Command::Equidist { r, c, d, interval } => {
            let g = gamma(r.radius)?;
            let e = spectral::equidist_count_check(&g, *c, *d, interval)?;
            Ok(Report {
                summary: format!("R={} count={} main_term={:.4} normalized_error={:.4}", g.radius(), e.count, e.main_term, e.normalized_error),
                csv: key_values(&[
                    ("count", e.count.to_string()),
                    ("main_term", num(e.main_term)),
                    ("normalized_error", num(e.normalized_error)),
                ]),
                json: json!({ "R": g.radius(), "c": c, "d": d, "I": interval, "result": e }),
            })
        }
        Command::DiagRect { r, k, cprime } => {
            let g = gamma(r.radius)?;
            let d = model::rect_approx_diagnostic(&g, *k, *cprime)?;
            Ok(Report {
                summary: format!(
                    "R={} k={k} C'={cprime} set_mismatch={:.4e} order_mismatch={:.4e} max_gap*R/k={:.3} k'∈[{},{}]",
                    g.radius(),
                    d.frac_set_mismatch,
                    d.frac_order_mismatch,
                    d.max_area_gap * g.radius() / *k as f64,
                    d.kprime_stats.min,
                    d.kprime_stats.max
                ),
                csv: key_values(&[
                    ("frac_set_mismatch", num(d.frac_set_mismatch)),
                    ("frac_order_mismatch", num(d.frac_order_mismatch)),
                    ("max_area_gap", num(d.max_area_gap)),
                    ("max_area_gap_to_k", num(d.max_area_gap_to_k)),
                    ("kprime_min", d.kprime_stats.min.to_string()),
                    ("kprime_max", d.kprime_stats.max.to_string()),
                    ("kprime_mean", num(d.kprime_stats.mean)),
                    ("kprime_below_k", d.kprime_stats.below_k.to_string()),
                ]),
                json: json!({ "R": g.radius(), "diagnostic": d }),
            })
        }
        Command::LimitDist { r, samples, seed } => {
            let g = gamma(r.radius)?;
            let s = statistics::area_series(&g);
            let ks = statistics::limit_distribution_test(&s, *samples, *seed)?;
            Ok(Report {
                summary: format!("R={} KS={ks:.6}", g.radius()),
                csv: key_values(&[("R", num(g.radius())), ("n_model", samples.to_string()), ("seed", seed.to_string()), ("ks", num(ks))]),
                json: json!({ "R": g.radius(), "n_model": samples, "seed": seed, "ks": ks }),
            })
        }
        Command::Verify { .. } | Command::Golden { .. } => Err(CliError::Internal("not an experiment command".into())),
    }
}
