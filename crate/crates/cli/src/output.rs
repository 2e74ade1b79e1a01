use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A command's result in both formats.
pub struct Rendered {
    pub schema: &'static str,
    pub default_format: Format,
    pub csv: String,
    pub json: String,
    /// Some row did not meet its convergence or agreement criterion.
    pub flagged: bool,
}

impl Rendered {
    pub fn new<T: Serialize>(
        schema: &'static str,
        default_format: Format,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
        json: &T,
        flagged: bool,
    ) -> Self {
        Rendered {
            schema,
            default_format,
            csv: csv_text(header, rows),
            json: serde_json::to_string_pretty(json).expect("output serializes") + "\n",
            flagged,
        }
    }

    pub fn text(&self, format: Option<Format>) -> &str {
        match format.unwrap_or(self.default_format) {
            Format::Csv => &self.csv,
            Format::Json => &self.json,
        }
    }
}

/// Seventeen significant digits; `nan`/`inf` spelled out.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string().to_lowercase()
    }
}

pub fn opt(x: Option<f64>) -> String {
    num(x.unwrap_or(f64::NAN))
}

pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
