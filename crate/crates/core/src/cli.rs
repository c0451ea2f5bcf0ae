//! File formats and drivers behind the `adafilter` binary.
//!
//! Input matrices are CSV with one column per study and an optional leading
//! identifier column named `feature`, `id` or `gene`. Outputs carry a
//! `#`-prefixed header line with the parameters that produced them.

use crate::combiner::{build_paired_scores, Combiner, PValueMatrix};
use crate::error::{Error, Result};
use crate::metrics::{MetricsRecord, Setting};
use crate::procedures::{
    run_adafilter_adabon, run_adafilter_bon, run_adaptive_bonferroni, run_adaptive_hochberg,
    run_augmented_adabon, run_generalized_bonferroni, run_hochberg_kfwer, Diagnostics, Method,
    ProcedureContext, RejectionResult,
};
use crate::simulate::{BaselineOptions, RNG_NAME};
use crate::sweep::SweepConfig;
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const ID_COLUMNS: [&str; 3] = ["feature", "id", "gene"];

/// Formats `x` with `digits` significant digits in plain decimal notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Formats `x` with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_exact).unwrap_or_else(|| "NA".into())
}

fn parse_opt(s: &str) -> std::result::Result<Option<f64>, String> {
    if s == "NA" || s.is_empty() {
        Ok(None)
    } else {
        s.parse()
            .map(Some)
            .map_err(|_| format!("'{s}' is not a number"))
    }
}

/// A p-value matrix with feature and study labels.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTable {
    pub features: Vec<String>,
    pub studies: Vec<String>,
    pub matrix: PValueMatrix,
}

/// Reads a features-by-studies p-value CSV. Row numbers in errors count the
/// header as row 1.
pub fn read_pvalue_csv<R: Read>(reader: R) -> Result<InputTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let has_id = headers
        .get(0)
        .is_some_and(|h| ID_COLUMNS.contains(&h.to_ascii_lowercase().as_str()));
    let first = usize::from(has_id);
    let studies: Vec<String> = headers.iter().skip(first).map(str::to_string).collect();
    if studies.is_empty() {
        return Err(Error::Parse {
            row: 1,
            column: 1,
            message: "no study columns".into(),
        });
    }
    let mut features = Vec::new();
    let mut values = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record.position().map_or(idx + 2, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row,
                column: record.len().min(headers.len()) + 1,
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        features.push(if has_id {
            record[0].to_string()
        } else {
            (idx + 1).to_string()
        });
        for (j, cell) in record.iter().enumerate().skip(first) {
            let err = |message: String| Error::Parse {
                row,
                column: j + 1,
                message,
            };
            if cell.is_empty()
                || cell.eq_ignore_ascii_case("na")
                || cell.eq_ignore_ascii_case("nan")
            {
                return Err(err("missing value".into()));
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| err(format!("'{cell}' is not a number")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(err(format!("p-value {v} is outside [0, 1]")));
            }
            values.push(v);
        }
    }
    if features.is_empty() {
        return Err(Error::Parse {
            row: 2,
            column: 1,
            message: "no data rows".into(),
        });
    }
    let matrix = PValueMatrix::from_row_major(features.len(), studies.len(), values)?;
    Ok(InputTable {
        features,
        studies,
        matrix,
    })
}

/// Options of the `analyze` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeRequest {
    pub method: Method,
    pub u: usize,
    pub k: usize,
    pub alpha: f64,
    pub theta: f64,
    pub gamma: f64,
    /// Apply the FDX augmentation to AdaFilter-AdaBon.
    pub augment: bool,
    /// Combiner for baseline methods; AdaFilter methods always use Bonferroni.
    pub combiner: Option<Combiner>,
    pub lambda: f64,
    pub kappa: Option<usize>,
}

impl Default for AnalyzeRequest {
    fn default() -> Self {
        Self {
            method: Method::AdafilterAdabon,
            u: 2,
            k: 1,
            alpha: 0.05,
            theta: 0.5,
            gamma: 0.1,
            augment: false,
            combiner: None,
            lambda: 0.5,
            kappa: None,
        }
    }
}

impl AnalyzeRequest {
    /// The method actually run once `augment` is taken into account.
    pub fn effective_method(&self) -> Result<Method> {
        match (self.method, self.augment) {
            (m, false) => Ok(m),
            (Method::AdafilterAdabon | Method::AugmentedAdabon, true) => {
                Ok(Method::AugmentedAdabon)
            }
            (m, true) => Err(Error::Unsupported(format!(
                "--augment applies to adafilter-adabon, not {m}"
            ))),
        }
    }

    pub fn context(&self) -> Result<ProcedureContext> {
        ProcedureContext::new(self.u, self.k, self.alpha, self.theta, self.gamma)
    }
}

/// Per-feature scores and the rejection result of one analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub method: Method,
    pub u: usize,
    pub k: usize,
    pub alpha: f64,
    pub theta: f64,
    pub gamma: f64,
    pub features: Vec<String>,
    pub s: Vec<f64>,
    pub f: Vec<f64>,
    /// Baseline PC p-values; `None` for AdaFilter methods.
    pub pc_pvalues: Option<Vec<f64>>,
    pub result: RejectionResult,
}

/// Runs the requested method on `table`.
pub fn analyze(table: &InputTable, req: &AnalyzeRequest) -> Result<AnalysisReport> {
    let method = req.effective_method()?;
    let ctx = req.context()?;
    ctx.check_studies(table.matrix.n())?;
    if method.uses_filter() && req.combiner == Some(Combiner::Fisher) {
        return Err(Error::Unsupported(format!(
            "{method} uses Bonferroni scores; --combiner fisher applies to baselines"
        )));
    }
    let scores = build_paired_scores(&table.matrix, req.u)?;
    let mut pc_pvalues = None;
    let result = match method {
        Method::AdafilterAdabon => run_adafilter_adabon(&scores, &ctx),
        Method::AdafilterBon => run_adafilter_bon(&scores, &ctx),
        Method::AugmentedAdabon => run_augmented_adabon(&scores, &ctx),
        baseline => {
            let opts = BaselineOptions {
                combiner: req.combiner.unwrap_or(Combiner::Fisher),
                lambda: req.lambda,
                kappa: req.kappa,
            };
            let p = opts.combiner.pc_pvalues(&table.matrix, req.u)?;
            let res = match baseline {
                Method::Bonferroni => run_generalized_bonferroni(&p, &ctx),
                Method::Hochberg => run_hochberg_kfwer(&p, &ctx),
                Method::AdaptiveBonferroni => run_adaptive_bonferroni(&p, &ctx, opts.lambda)?,
                _ => run_adaptive_hochberg(&p, &ctx, opts.kappa_for(p.len()))?,
            };
            pc_pvalues = Some(p);
            res
        }
    };
    Ok(AnalysisReport {
        method,
        u: req.u,
        k: req.k,
        alpha: req.alpha,
        theta: req.theta,
        gamma: req.gamma,
        features: table.features.clone(),
        s: scores.s().to_vec(),
        f: scores.f().to_vec(),
        pc_pvalues,
        result,
    })
}

const ANALYSIS_COLUMNS: [&str; 8] = [
    "feature",
    "s",
    "f",
    "pc_pvalue",
    "survivor",
    "rejected",
    "threshold",
    "pi0_hat",
];

/// Writes a report as CSV. Real numbers use 17 significant digits so that
/// [`read_analysis`] recovers the report exactly.
pub fn write_analysis<W: Write>(report: &AnalysisReport, mut out: W) -> Result<()> {
    let r = &report.result;
    let d = &r.diagnostics;
    writeln!(
        out,
        "# adafilter {VERSION} analyze; method={}; u={}; k={}; alpha={}; theta={}; gamma={}; threshold={}; grid_threshold={}; base_threshold={}; pi0_hat={}",
        report.method,
        report.u,
        report.k,
        fmt_exact(report.alpha),
        fmt_exact(report.theta),
        fmt_exact(report.gamma),
        fmt_exact(r.threshold),
        fmt_opt(d.grid_threshold),
        fmt_opt(d.base_threshold),
        fmt_opt(d.pi0_hat),
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ANALYSIS_COLUMNS)?;
    let rejected = r.mask(report.s.len());
    let survivors = d.survivors.as_ref().map(|sv| {
        let mut mask = vec![false; report.s.len()];
        sv.iter().for_each(|&i| mask[i] = true);
        mask
    });
    let threshold = fmt_exact(r.threshold);
    let pi0 = fmt_opt(d.pi0_hat);
    for i in 0..report.s.len() {
        let pc = report.pc_pvalues.as_ref().map(|p| p[i]);
        let surv = survivors
            .as_ref()
            .map_or("NA", |m| if m[i] { "1" } else { "0" });
        w.write_record([
            report.features[i].as_str(),
            &fmt_exact(report.s[i]),
            &fmt_exact(report.f[i]),
            &fmt_opt(pc),
            surv,
            if rejected[i] { "1" } else { "0" },
            &threshold,
            &pi0,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn header_fields(line: &str, tag: &str) -> Result<BTreeMap<String, String>> {
    let bad = |message: String| Error::Parse {
        row: 1,
        column: 1,
        message,
    };
    let body = line
        .strip_prefix("# adafilter ")
        .ok_or_else(|| bad("missing '# adafilter' header line".into()))?;
    let mut parts = body.split("; ");
    let first = parts.next().unwrap_or_default();
    if first.split_whitespace().nth(1) != Some(tag) {
        return Err(bad(format!("expected a '{tag}' header, found '{first}'")));
    }
    parts
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| bad(format!("malformed header field '{kv}'")))
        })
        .collect()
}

fn field<'a>(map: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Parse {
            row: 1,
            column: 1,
            message: format!("header lacks '{key}'"),
        })
}

fn parse_field<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let v = field(map, key)?;
    v.parse().map_err(|_| Error::Parse {
        row: 1,
        column: 1,
        message: format!("bad {key} '{v}'"),
    })
}

/// Reads a report written by [`write_analysis`].
pub fn read_analysis<R: Read>(reader: R) -> Result<AnalysisReport> {
    let mut buf = BufReader::new(reader);
    let mut line = String::new();
    buf.read_line(&mut line)?;
    let head = header_fields(line.trim_end(), "analyze")?;
    let method: Method = parse_field(&head, "method")?;
    let threshold: f64 = parse_field(&head, "threshold")?;
    let opt = |key: &str| {
        parse_opt(field(&head, key)?).map_err(|message| Error::Parse {
            row: 1,
            column: 1,
            message,
        })
    };
    let diagnostics_head = (
        opt("grid_threshold")?,
        opt("base_threshold")?,
        opt("pi0_hat")?,
    );

    let mut rdr = csv::Reader::from_reader(buf);
    if rdr.headers()?.iter().ne(ANALYSIS_COLUMNS) {
        return Err(Error::Parse {
            row: 2,
            column: 1,
            message: "unexpected column header".into(),
        });
    }
    let (mut features, mut s, mut f, mut pc, mut surv, mut rejected) = (
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
    );
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 3;
        let num = |j: usize| -> Result<Option<f64>> {
            parse_opt(&rec[j]).map_err(|message| Error::Parse {
                row,
                column: j + 1,
                message,
            })
        };
        let req = |j: usize| -> Result<f64> {
            num(j)?.ok_or_else(|| Error::Parse {
                row,
                column: j + 1,
                message: "missing value".into(),
            })
        };
        features.push(rec[0].to_string());
        s.push(req(1)?);
        f.push(req(2)?);
        pc.push(num(3)?);
        surv.push(match &rec[4] {
            "NA" => None,
            v => Some(v == "1"),
        });
        if &rec[5] == "1" {
            rejected.push(i);
        }
    }
    let survivors = if surv.iter().all(Option::is_some) && !surv.is_empty() {
        Some(
            surv.iter()
                .enumerate()
                .filter(|(_, v)| **v == Some(true))
                .map(|(i, _)| i)
                .collect(),
        )
    } else if surv.is_empty() && method.uses_filter() {
        Some(Vec::new())
    } else {
        None
    };
    let pc_pvalues = if pc.iter().all(Option::is_some) && !pc.is_empty() {
        Some(pc.into_iter().flatten().collect())
    } else {
        None
    };
    let (grid_threshold, base_threshold, pi0_hat) = diagnostics_head;
    Ok(AnalysisReport {
        method,
        u: parse_field(&head, "u")?,
        k: parse_field(&head, "k")?,
        alpha: parse_field(&head, "alpha")?,
        theta: parse_field(&head, "theta")?,
        gamma: parse_field(&head, "gamma")?,
        features,
        s,
        f,
        pc_pvalues,
        result: RejectionResult {
            method,
            threshold,
            rejected,
            diagnostics: Diagnostics {
                pi0_hat,
                survivors,
                grid_threshold,
                base_threshold,
            },
        },
    })
}

/// Columns of a metrics table, in order.
pub const METRICS_COLUMNS: [&str; 18] = [
    "method", "u", "k", "alpha", "pi1", "rho", "theta", "gamma", "reps", "kfwer", "kfwer_se",
    "tpr", "tpr_se", "fdx", "fdx_se", "fdr", "fdr_se", "mean_pi0",
];

/// Writes sweep results. Rates carry 6 significant digits; the output is a
/// pure function of `cfg`.
pub fn write_metrics<W: Write>(
    records: &[MetricsRecord],
    cfg: &SweepConfig,
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "# adafilter {VERSION} metrics; rng={RNG_NAME}; master_seed={}; m={}; n={}; mu={}; reps={}; combiner={}; lambda={}; kappa={}; block_size={}",
        cfg.master_seed,
        cfg.m,
        cfg.n,
        cfg.mu_magnitude,
        cfg.reps,
        match cfg.combiner {
            Combiner::Bonferroni => "bonferroni",
            Combiner::Fisher => "fisher",
        },
        cfg.lambda,
        cfg.baseline_options().kappa_for(cfg.m),
        cfg.block_size.map_or("default".to_string(), |b| b.to_string()),
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_COLUMNS)?;
    for r in records {
        let s = &r.setting;
        let rate = |x: f64| fmt_sig(x, 6);
        w.write_record([
            r.method.name().to_string(),
            s.u.to_string(),
            s.k.to_string(),
            s.alpha.to_string(),
            s.pi1.to_string(),
            s.rho.to_string(),
            s.theta.to_string(),
            s.gamma.to_string(),
            r.reps.to_string(),
            rate(r.kfwer),
            rate(r.kfwer_se),
            rate(r.tpr),
            rate(r.tpr_se),
            rate(r.fdx),
            rate(r.fdx_se),
            rate(r.fdr),
            rate(r.fdr_se),
            rate(r.mean_pi0),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a metrics table. Only `method`, `u`, `k`, `alpha`, `pi1`, `rho`,
/// `kfwer` and `tpr` are required; other columns default to zero.
pub fn read_metrics<R: Read>(reader: R) -> Result<Vec<MetricsRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = ["method", "u", "k", "alpha", "pi1", "rho", "kfwer", "tpr"];
    if let Some(missing) = required.iter().find(|c| col(c).is_none()) {
        return Err(Error::Parse {
            row: 1,
            column: 1,
            message: format!("missing column '{missing}'"),
        });
    }
    let idx: Vec<Option<usize>> = METRICS_COLUMNS.iter().map(|c| col(c)).collect();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map_or(i + 2, |p| p.line() as usize);
        let get = |c: usize| -> Result<f64> {
            match idx[c] {
                None => Ok(0.0),
                Some(j) => rec.get(j).unwrap_or("").parse().map_err(|_| Error::Parse {
                    row,
                    column: j + 1,
                    message: format!("'{}' is not a number", rec.get(j).unwrap_or("")),
                }),
            }
        };
        let method: Method = rec[idx[0].expect("required")]
            .parse()
            .map_err(|_| Error::Parse {
                row,
                column: idx[0].unwrap() + 1,
                message: format!("unknown method '{}'", &rec[idx[0].unwrap()]),
            })?;
        out.push(MetricsRecord {
            method,
            setting: Setting {
                u: get(1)? as usize,
                k: get(2)? as usize,
                alpha: get(3)?,
                pi1: get(4)?,
                rho: get(5)?,
                theta: get(6)?,
                gamma: get(7)?,
            },
            reps: get(8)? as usize,
            kfwer: get(9)?,
            kfwer_se: get(10)?,
            tpr: get(11)?,
            tpr_se: get(12)?,
            fdx: get(13)?,
            fdx_se: get(14)?,
            fdr: get(15)?,
            fdr_se: get(16)?,
            mean_pi0: get(17)?,
        });
    }
    if out.is_empty() {
        return Err(Error::Parse {
            row: 2,
            column: 1,
            message: "metrics table has no rows".into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "feature,a,b,c\ng1,1e-6,2e-6,0.3\ng2,0.4,0.5,0.6\ng3,1e-5,0.9,0.8\n";

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0495, 6), "0.0495000");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1.0, 6), "1.00000");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_exact(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn reads_identifier_column() {
        let t = read_pvalue_csv(CSV.as_bytes()).unwrap();
        assert_eq!(t.features, vec!["g1", "g2", "g3"]);
        assert_eq!(t.studies, vec!["a", "b", "c"]);
        assert_eq!(t.matrix.row(2), &[1e-5, 0.9, 0.8]);
        let plain = read_pvalue_csv("a,b\n0.1,0.2\n".as_bytes()).unwrap();
        assert_eq!(plain.features, vec!["1"]);
    }

    #[test]
    fn reports_bad_cells_with_position() {
        let err = read_pvalue_csv("a,b\n0.1,0.2\n0.3,\n".as_bytes()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    row: 3,
                    column: 2,
                    ..
                }
            ),
            "{err}"
        );
        let err = read_pvalue_csv("a,b\n0.1,x\n".as_bytes()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    row: 2,
                    column: 2,
                    ..
                }
            ),
            "{err}"
        );
        let err = read_pvalue_csv("a,b\n0.1,1.5\n".as_bytes()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    row: 2,
                    column: 2,
                    ..
                }
            ),
            "{err}"
        );
        assert!(read_pvalue_csv("a,b\n".as_bytes()).is_err());
    }

    #[test]
    fn analysis_round_trips() {
        let t = read_pvalue_csv(CSV.as_bytes()).unwrap();
        for (method, augment) in [
            (Method::AdafilterAdabon, false),
            (Method::AdafilterAdabon, true),
            (Method::AdafilterBon, false),
            (Method::Hochberg, false),
            (Method::AdaptiveHochberg, false),
        ] {
            let req = AnalyzeRequest {
                method,
                augment,
                ..Default::default()
            };
            let rep = analyze(&t, &req).unwrap();
            let mut buf = Vec::new();
            write_analysis(&rep, &mut buf).unwrap();
            let back = read_analysis(buf.as_slice()).unwrap();
            assert_eq!(back, rep, "{}", String::from_utf8_lossy(&buf));
        }
    }

    #[test]
    fn rejects_incompatible_requests() {
        let t = read_pvalue_csv(CSV.as_bytes()).unwrap();
        let aug = AnalyzeRequest {
            method: Method::Hochberg,
            augment: true,
            ..Default::default()
        };
        assert!(matches!(analyze(&t, &aug), Err(Error::Unsupported(_))));
        let fisher = AnalyzeRequest {
            combiner: Some(Combiner::Fisher),
            ..Default::default()
        };
        assert!(matches!(analyze(&t, &fisher), Err(Error::Unsupported(_))));
        let big_u = AnalyzeRequest {
            u: 4,
            ..Default::default()
        };
        assert!(analyze(&t, &big_u).is_err());
    }

    #[test]
    fn metrics_round_trip_at_print_precision() {
        let cfg = SweepConfig {
            reps: 2,
            pi1: vec![0.1],
            rho: vec![0.2],
            u: vec![2],
            ..Default::default()
        };
        let recs = crate::sweep::run_sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        write_metrics(&recs, &cfg, &mut buf).unwrap();
        let back = read_metrics(buf.as_slice()).unwrap();
        assert_eq!(back.len(), recs.len());
        for (a, b) in back.iter().zip(&recs) {
            assert_eq!(a.method, b.method);
            assert_eq!(a.setting, b.setting);
            assert!((a.tpr - b.tpr).abs() <= 1e-6 * b.tpr.abs().max(1e-300) + 1e-12);
        }
        assert!(read_metrics("method,u\n".as_bytes()).is_err());
        let header_only = METRICS_COLUMNS.join(",") + "\n";
        assert!(read_metrics(header_only.as_bytes()).is_err());
    }
}
