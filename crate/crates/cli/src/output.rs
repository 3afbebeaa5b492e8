use std::fmt::Write;

pub const CSV_HEADER: &str = "# thermwit-csv v1";

/// Fixed 13-significant-digit scientific notation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.12e}")
    }
}

/// Formats `e^{ln}` in the same style as [`num`], without overflowing when the value
/// itself is not representable.
pub fn num_from_ln(ln: f64) -> String {
    let direct = ln.exp();
    if direct.is_normal() {
        return num(direct);
    }
    if ln.is_nan() {
        return "nan".into();
    }
    if ln == f64::NEG_INFINITY {
        return num(0.0);
    }
    if ln == f64::INFINITY {
        return "inf".into();
    }
    let mut l10 = ln / std::f64::consts::LN_10;
    if (l10 - l10.round()).abs() <= 8.0 * f64::EPSILON * l10.abs() {
        l10 = l10.round();
    }
    let mut exponent = l10.floor();
    let mut mantissa = 10f64.powf(l10 - exponent);
    if format!("{mantissa:.12}").starts_with("10") {
        mantissa /= 10.0;
        exponent += 1.0;
    }
    format!("{mantissa:.12}e{exponent}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub temperature: f64,
    pub ln_z: f64,
    pub population: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub bound_kind: String,
    pub extra: Vec<f64>,
}

/// A CSV table followed by a `## key = value` summary block.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub extra_columns: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
    pub summary: Vec<(String, String)>,
}

impl Report {
    pub fn new(extra_columns: Vec<&'static str>) -> Self {
        Self {
            extra_columns,
            ..Self::default()
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }

    /// Input parameters, in shortest round-trip form.
    pub fn push_param(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, value.to_string());
    }

    pub fn push_num(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, num(value));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        let mut header = vec!["T", "Z", "p", "threshold", "satisfied", "bound_kind"];
        header.extend(&self.extra_columns);
        writeln!(out, "{}", header.join(",")).unwrap();
        for r in &self.rows {
            let mut fields = vec![
                num(r.temperature),
                num_from_ln(r.ln_z),
                num(r.population),
                num(r.threshold),
                r.satisfied.to_string(),
                r.bound_kind.clone(),
            ];
            fields.extend(r.extra.iter().map(|&x| num(x)));
            writeln!(out, "{}", fields.join(",")).unwrap();
        }
        for (k, v) in &self.summary {
            writeln!(out, "## {k} = {v}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_partition_functions_do_not_overflow() {
        assert_eq!(num_from_ln(0.0), "1.000000000000e0");
        assert_eq!(num_from_ln(10f64.ln() * 5.0), "1.000000000000e5");
        assert_eq!(num_from_ln(1000.0 * std::f64::consts::LN_10), "1.000000000000e1000");
        assert_eq!(num_from_ln(-1000.0 * std::f64::consts::LN_10), "1.000000000000e-1000");
        let s = num_from_ln(2000.0);
        let (m, e) = s.split_once('e').unwrap();
        let log10 = m.parse::<f64>().unwrap().log10() + e.parse::<f64>().unwrap();
        assert!((log10 - 2000.0 / std::f64::consts::LN_10).abs() < 1e-9);
    }

    #[test]
    fn render_layout() {
        let mut r = Report::new(vec!["concurrence"]);
        r.rows.push(SweepRow {
            temperature: 1.0,
            ln_z: 0.0,
            population: 0.5,
            threshold: 0.5,
            satisfied: false,
            bound_kind: "exact".into(),
            extra: vec![0.25],
        });
        r.push("system", "dimer");
        let text = r.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "T,Z,p,threshold,satisfied,bound_kind,concurrence");
        assert_eq!(lines[2].split(',').count(), 7);
        assert_eq!(lines[3], "## system = dimer");
    }
}
