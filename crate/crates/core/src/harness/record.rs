//! One row of a sweep and its CSV / JSON-lines persistence.
//!
//! Floats are written in Rust's shortest round-trip form (`inf` for
//! infinity); in JSON lines an infinite value is the string `"inf"`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde_json::{Map, Value};

use crate::error::{LnlsError, Result};

pub const CSV_HEADER: &str = "experiment,h,N,q,r,epsilon,t,value,ratio";

/// A single measurement. Columns that do not apply to an experiment are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub h: f64,
    /// Dyadic scale `N`.
    pub n: Option<f64>,
    /// Time exponent of a mixed norm.
    pub q: Option<f64>,
    /// Space (Lebesgue) exponent.
    pub r: Option<f64>,
    pub epsilon: Option<f64>,
    pub t: Option<f64>,
    /// The measured quantity (norm, error, kernel sup, ...).
    pub value: f64,
    /// The normalised quantity whose uniformity is being checked.
    pub ratio: Option<f64>,
    /// Free-form context: `p`, `lambda`, `q_star`, `integrator`, `dt`, profile tag, ...
    pub metadata: BTreeMap<String, String>,
}

impl ExperimentRecord {
    pub fn new(experiment: impl Into<String>, h: f64, value: f64) -> Self {
        ExperimentRecord { experiment: experiment.into(), h, value, ..Default::default() }
    }

    pub fn with_n(mut self, n: f64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = Some(ratio);
        self
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    /// The CSV row (no trailing newline). Metadata is not part of the CSV.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            escape_csv(&self.experiment),
            fmt_float(self.h),
            opt(self.n),
            opt(self.q),
            opt(self.r),
            opt(self.epsilon),
            opt(self.t),
            fmt_float(self.value),
            opt(self.ratio)
        )
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("experiment".into(), Value::String(self.experiment.clone()));
        m.insert("h".into(), json_float(self.h));
        let fields = [
            ("N", self.n),
            ("q", self.q),
            ("r", self.r),
            ("epsilon", self.epsilon),
            ("t", self.t),
        ];
        for (k, v) in fields {
            m.insert(k.into(), v.map(json_float).unwrap_or(Value::Null));
        }
        m.insert("value".into(), json_float(self.value));
        m.insert("ratio".into(), self.ratio.map(json_float).unwrap_or(Value::Null));
        let meta = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        m.insert("metadata".into(), Value::Object(meta));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| LnlsError::Format("record is not a JSON object".into()))?;
        let field = |k: &str| -> Result<Option<f64>> {
            match obj.get(k) {
                None | Some(Value::Null) => Ok(None),
                Some(x) => parse_json_float(x).map(Some),
            }
        };
        let required = |k: &str| -> Result<f64> {
            field(k)?.ok_or_else(|| LnlsError::Format(format!("record missing field {k:?}")))
        };
        let experiment = obj
            .get("experiment")
            .and_then(Value::as_str)
            .ok_or_else(|| LnlsError::Format("record missing field \"experiment\"".into()))?
            .to_string();
        let mut metadata = BTreeMap::new();
        if let Some(Value::Object(meta)) = obj.get("metadata") {
            for (k, v) in meta {
                let s = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                metadata.insert(k.clone(), s);
            }
        }
        Ok(ExperimentRecord {
            experiment,
            h: required("h")?,
            n: field("N")?,
            q: field("q")?,
            r: field("r")?,
            epsilon: field("epsilon")?,
            t: field("t")?,
            value: required("value")?,
            ratio: field("ratio")?,
            metadata,
        })
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

fn json_float(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(fmt_float(x)))
}

fn parse_json_float(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| LnlsError::Format(format!("bad number {n}"))),
        Value::String(s) => s
            .parse::<f64>()
            .map_err(|_| LnlsError::Format(format!("bad float string {s:?}"))),
        other => Err(LnlsError::Format(format!("expected a number, got {other}"))),
    }
}

fn escape_csv(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv(records: &[ExperimentRecord], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_jsonl(records: &[ExperimentRecord], mut w: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, &r.to_json())?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_jsonl(r: impl BufRead) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(ExperimentRecord::from_json(&serde_json::from_str(&line)?)?);
    }
    Ok(out)
}
