//! Reading a p-value CSV, analyzing it, and writing the report, all in
//! memory.
//!
//! cargo run --example analyze_csv

use adafilter::cli::{analyze, read_analysis, read_pvalue_csv, write_analysis, AnalyzeRequest};
use adafilter::Method;

const INPUT: &str = "\
feature,study_a,study_b,study_c
g1,1e-7,2e-5,0.40
g2,0.51,0.33,0.72
g3,3e-4,1e-6,2e-3
g4,0.02,0.81,0.64
";

fn main() -> adafilter::Result<()> {
    let table = read_pvalue_csv(INPUT.as_bytes())?;
    let req = AnalyzeRequest {
        method: Method::AdafilterAdabon,
        u: 2,
        ..Default::default()
    };
    let report = analyze(&table, &req)?;

    let mut buf = Vec::new();
    write_analysis(&report, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));

    assert_eq!(read_analysis(buf.as_slice())?, report);
    Ok(())
}
