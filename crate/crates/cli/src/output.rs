use std::fmt::Write as _;

/// Six significant digits, scientific notation, period decimal separator.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_else(|| "---".into())
}

/// Plain left-aligned text table.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let n = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (i, c) in r.iter().enumerate().take(n) {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                if i + 1 == cells.len() {
                    s.push_str(c);
                } else {
                    let pad = widths[i] - c.chars().count();
                    s.push_str(c);
                    s.push_str(&" ".repeat(pad + 2));
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        writeln!(out, "{}", line(&self.headers)).unwrap();
        let total: usize = widths.iter().sum::<usize>() + 2 * (n.saturating_sub(1));
        writeln!(out, "{}", "-".repeat(total)).unwrap();
        for r in &self.rows {
            writeln!(out, "{}", line(r)).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format() {
        assert_eq!(sci(1.6666666e-13), "1.66667e-13");
        assert_eq!(sci(5e7), "5.00000e7");
        assert_eq!(sci(f64::INFINITY), "inf");
        assert_eq!(sci_opt(None), "---");
    }

    #[test]
    fn table_alignment() {
        let mut t = Table::new(["a", "bb"]);
        t.row(["ccc", "d"]);
        assert_eq!(t.render(), "a    bb\n-------\nccc  d\n");
    }
}
