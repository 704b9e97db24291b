//! Report rows and their CSV/JSON rendering.
//!
//! CSV is the human-facing format (6 significant digits); JSON carries 17
//! significant digits so every double round-trips exactly.

use rlnn_core::{BoundReport, RlnnResult};

#[derive(Clone, Debug)]
pub struct PriceRow {
    pub instrument: String,
    pub s0: f64,
    pub hidden: usize,
    pub seed: u64,
    pub direct: f64,
    pub lower: f64,
    pub lower_se: f64,
    pub upper: f64,
    pub upper_se: f64,
}

impl PriceRow {
    pub fn new(instrument: &str, result: &RlnnResult, report: &BoundReport, seed: u64) -> Self {
        Self {
            instrument: instrument.to_string(),
            s0: result.scale,
            hidden: result.hidden,
            seed,
            direct: result.direct_estimate,
            lower: report.lower,
            lower_se: report.lower_se,
            upper: report.upper,
            upper_se: report.upper_se,
        }
    }
}

/// printf-`%g`-style formatting with the requested significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.*e}", digits - 1, x);
    // `1.23450e-2` -> mantissa/exponent
    let (mant, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        return format!("{mant}e{exp}");
    }
    // positional form with `digits` significant digits
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let t = format!("{:.*}", decimals, x);
    if t.contains('.') {
        t.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        t
    }
}

/// Full-precision form for JSON payloads (17 significant digits).
pub fn fmt_full(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    format!("{:.16e}", x)
}

pub const PRICE_HEADER: &str = "instrument,s0,p,seed,direct,lower,lower_se,upper,upper_se";

pub fn price_row_csv(r: &PriceRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.instrument,
        fmt_sig(r.s0, 6),
        r.hidden,
        r.seed,
        fmt_sig(r.direct, 6),
        fmt_sig(r.lower, 6),
        fmt_sig(r.lower_se, 6),
        fmt_sig(r.upper, 6),
        fmt_sig(r.upper_se, 6)
    )
}

fn json_row(r: &PriceRow) -> String {
    format!(
        "{{\"instrument\":\"{}\",\"s0\":{},\"p\":{},\"seed\":{},\"direct\":{},\"lower\":{},\"lower_se\":{},\"upper\":{},\"upper_se\":{}}}",
        r.instrument,
        fmt_full(r.s0),
        r.hidden,
        r.seed,
        fmt_full(r.direct),
        fmt_full(r.lower),
        fmt_full(r.lower_se),
        fmt_full(r.upper),
        fmt_full(r.upper_se)
    )
}

/// Cross-run mean and standard error of one column (the repeat-mode
/// aggregation over independent seeds).
fn cross(values: &[f64]) -> (f64, f64) {
    rlnn_core::math::mean_and_se(values)
}

pub struct Summary {
    pub n_runs: usize,
    pub direct: (f64, f64),
    pub lower: (f64, f64),
    pub upper: (f64, f64),
}

pub fn summarize(rows: &[PriceRow]) -> Option<Summary> {
    if rows.len() < 2 {
        return None;
    }
    let col = |f: fn(&PriceRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    Some(Summary {
        n_runs: rows.len(),
        direct: cross(&col(|r| r.direct)),
        lower: cross(&col(|r| r.lower)),
        upper: cross(&col(|r| r.upper)),
    })
}

/// Whole report as CSV; repeat mode appends `cross_mean` / `cross_se` rows.
pub fn render_csv(rows: &[PriceRow]) -> String {
    let mut out = String::from(PRICE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&price_row_csv(r));
        out.push('\n');
    }
    if let Some(s) = summarize(rows) {
        let base = &rows[0];
        out.push_str(&format!(
            "{},{},{},cross_mean,{},{},,{},\n",
            base.instrument,
            fmt_sig(base.s0, 6),
            base.hidden,
            fmt_sig(s.direct.0, 6),
            fmt_sig(s.lower.0, 6),
            fmt_sig(s.upper.0, 6)
        ));
        out.push_str(&format!(
            "{},{},{},cross_se,{},{},,{},\n",
            base.instrument,
            fmt_sig(base.s0, 6),
            base.hidden,
            fmt_sig(s.direct.1, 6),
            fmt_sig(s.lower.1, 6),
            fmt_sig(s.upper.1, 6)
        ));
    }
    out
}

pub fn render_json(rows: &[PriceRow]) -> String {
    let mut out = String::from("{\n  \"runs\": [\n");
    for (i, r) in rows.iter().enumerate() {
        out.push_str("    ");
        out.push_str(&json_row(r));
        if i + 1 < rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]");
    if let Some(s) = summarize(rows) {
        out.push_str(&format!(
            ",\n  \"summary\": {{\"n_runs\":{},\"direct_mean\":{},\"direct_se\":{},\"lower_mean\":{},\"lower_se\":{},\"upper_mean\":{},\"upper_se\":{}}}",
            s.n_runs,
            fmt_full(s.direct.0),
            fmt_full(s.direct.1),
            fmt_full(s.lower.0),
            fmt_full(s.lower.1),
            fmt_full(s.upper.0),
            fmt_full(s.upper.1)
        ));
    }
    out.push_str("\n}\n");
    out
}

/// Writes to a file, or to stdout when the path is `-` or absent.
pub fn emit(out: Option<&str>, content: &str) -> anyhow::Result<()> {
    match out {
        None | Some("-") => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| anyhow::anyhow!("cannot write `{path}`: {e}"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(2.29340071, 6), "2.2934");
        assert_eq!(fmt_sig(0.00013001, 6), "0.00013001");
        assert_eq!(fmt_sig(-13.9024, 6), "-13.9024");
        assert_eq!(fmt_sig(123456789.0, 6), "1.23457e8");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1e-9, 6), "1e-9");
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [2.2929371234567891, -1.0984e-7, 0.1803000000000001, f64::MIN_POSITIVE] {
            let s = fmt_full(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
