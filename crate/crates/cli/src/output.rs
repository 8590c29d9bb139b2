//! Artifact serialization: RLE streams, chaos reports, CSV tables and the
//! hashed manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use shiftlab_core::analyze::{ChaosReport, CheckRow};
use shiftlab_core::num::{fmt_rat, rat_to_f64, Int, Rat};
use shiftlab_core::symbolic::{Cycle, Piece, Side, SymbolStream, Word};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn r(v: &Rat) -> Value {
    Value::String(fmt_rat(v))
}

pub fn i(v: &Int) -> Value {
    Value::String(v.to_string())
}

pub struct Run {
    pub format: Format,
    artifacts: Vec<(String, Vec<u8>)>,
    invariants: Vec<(String, bool, String)>,
    pub result: Map<String, Value>,
}

impl Run {
    pub fn new(format: Format) -> Self {
        Run { format, artifacts: Vec::new(), invariants: Vec::new(), result: Map::new() }
    }

    pub fn file(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.artifacts.push((name.into(), bytes));
    }

    pub fn json(&mut self, name: impl Into<String>, v: &Value) {
        let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
        s.push('\n');
        self.file(name, s.into_bytes());
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.invariants.push((name.into(), pass, detail.into()));
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.result.insert(key.into(), v);
    }

    /// Table artifact in the requested format; `rows` share `header`.
    pub fn table(&mut self, stem: &str, header: &[&str], rows: Vec<Vec<Value>>) {
        match self.format {
            Format::Json => {
                let objs: Vec<Value> = rows
                    .into_iter()
                    .map(|row| Value::Object(header.iter().map(|h| h.to_string()).zip(row).collect()))
                    .collect();
                self.json(format!("{stem}.json"), &Value::Array(objs));
            }
            Format::Csv => {
                let mut s = header.join(",");
                s.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                self.file(format!("{stem}.csv"), s.into_bytes());
            }
        }
    }

    /// Writes artifacts and the manifest; fails with the names of failed
    /// invariant checks after writing.
    pub fn finish(self, out: &Path, command: &str, config: Value) -> CliResult<Value> {
        let mut listed = Vec::new();
        for (name, bytes) in &self.artifacts {
            let path = out.join(name);
            if let Some(dir) = path.parent() {
                mkdir(dir)?;
            }
            std::fs::write(&path, bytes).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            listed.push(json!({ "path": name, "bytes": bytes.len(), "sha256": hex(&Sha256::digest(bytes)) }));
        }
        let failed: Vec<String> = self.invariants.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
        let invariants: Vec<Value> =
            self.invariants.iter().map(|(n, p, d)| json!({ "name": n, "pass": p, "detail": d })).collect();
        let mut manifest = json!({
            "tool": "shiftlab",
            "command": command,
            "config": config,
            "versions": {
                "shiftlab-cli": env!("CARGO_PKG_VERSION"),
                "shiftlab-core": shiftlab_core::VERSION,
                "shiftlab-construct": shiftlab_construct::VERSION,
            },
            "invariants": invariants,
            "status": if failed.is_empty() { "ok" } else { "invariant-failure" },
            "result": Value::Object(self.result),
            "artifacts": listed,
        });
        let hash = manifest_hash(&manifest);
        manifest["hash"] = Value::String(hash);
        let mut text = serde_json::to_string_pretty(&manifest).expect("json values serialize");
        text.push('\n');
        let path = out.join("manifest.json");
        std::fs::write(&path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        if failed.is_empty() {
            Ok(manifest)
        } else {
            Err(CliError::Invariant(failed))
        }
    }
}

pub fn mkdir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("output directory {} is not writable: {e}", dir.display())))
}

/// sha256 of the pretty-printed manifest without its "hash" field.
pub fn manifest_hash(manifest: &Value) -> String {
    let mut m = manifest.clone();
    if let Value::Object(o) = &mut m {
        o.remove("hash");
    }
    hex(&Sha256::digest(serde_json::to_string_pretty(&m).expect("json values serialize").as_bytes()))
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Run-length encoding: one run per periodic piece, unbounded ends as null.
pub fn stream_rle(x: &SymbolStream, alphabet: usize) -> CliResult<Value> {
    let (first, last) = x.end_pieces().ok_or_else(|| CliError::Config("lazy streams have no run-length form".into()))?;
    let mut runs = vec![];
    match x.bounded_extent() {
        None => runs.push(first),
        Some((lo, hi)) => {
            let lo = match (x.side(), lo) {
                (Side::OneSided, _) => Int::from(1),
                (Side::TwoSided, Some(lo)) => {
                    runs.push(first);
                    lo
                }
                (Side::TwoSided, None) => return Err(CliError::Config("malformed two-sided stream".into())),
            };
            runs.extend(x.pieces(&lo, &hi)?);
            runs.push(last);
        }
    }
    let side = match x.side() {
        Side::OneSided => "one-sided",
        Side::TwoSided => "two-sided",
    };
    let runs: Vec<Value> = runs
        .iter()
        .map(|p| {
            json!({
                "start": p.start.as_ref().map_or(Value::Null, i),
                "end": p.end.as_ref().map_or(Value::Null, i),
                "cycle": p.cycle.word().render(alphabet),
                "anchor": i(&p.anchor),
            })
        })
        .collect();
    Ok(json!({ "format": "shiftlab-rle", "side": side, "alphabet": alphabet, "runs": runs }))
}

pub fn read_stream(path: &PathBuf) -> CliResult<SymbolStream> {
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    parse_rle(&v).map_err(|e| match e {
        CliError::Config(m) => bad(m),
        other => other,
    })
}

pub fn parse_rle(v: &Value) -> CliResult<SymbolStream> {
    let bad = |m: &str| CliError::Config(m.to_string());
    if v["format"] != "shiftlab-rle" {
        return Err(bad("not a shiftlab-rle stream"));
    }
    let side = match v["side"].as_str() {
        Some("one-sided") => Side::OneSided,
        Some("two-sided") => Side::TwoSided,
        _ => return Err(bad("side must be one-sided or two-sided")),
    };
    let alphabet = v["alphabet"].as_u64().ok_or_else(|| bad("missing alphabet"))? as usize;
    let int_of = |x: &Value| -> CliResult<Option<Int>> {
        match x {
            Value::Null => Ok(None),
            Value::String(s) => s.parse::<Int>().map(Some).map_err(|_| bad("bad coordinate")),
            _ => Err(bad("coordinates are strings")),
        }
    };
    let mut pieces = Vec::new();
    for run in v["runs"].as_array().ok_or_else(|| bad("missing runs"))? {
        let cycle = run["cycle"].as_str().ok_or_else(|| bad("missing cycle"))?;
        let w = Word::parse(cycle, alphabet)?;
        if w.is_empty() {
            return Err(bad("empty cycle"));
        }
        pieces.push(Piece {
            start: int_of(&run["start"])?,
            end: int_of(&run["end"])?,
            cycle: Cycle::from_word(&w),
            anchor: int_of(&run["anchor"])?.ok_or_else(|| bad("missing anchor"))?,
        });
    }
    Ok(SymbolStream::from_pieces(side, pieces)?)
}

fn row_json(kind: &str, c: &CheckRow) -> Vec<Value> {
    vec![json!(kind), i(&c.n), r(&c.t), r(&c.lo), r(&c.hi), r(&c.bound), json!(c.pass)]
}

pub const CHECK_HEADER: [&str; 7] = ["kind", "n", "t", "lo", "hi", "bound", "pass"];
pub const CURVE_HEADER: [&str; 4] = ["t", "n", "phi", "phi_approx"];

/// Verdict summary plus checkpoint and curve tables.
pub fn chaos_report(run: &mut Run, stem: &str, rep: &ChaosReport) -> Value {
    let mut rows: Vec<Vec<Value>> = rep.separation.iter().map(|c| row_json("separation", c)).collect();
    rows.extend(rep.closeness.iter().map(|c| row_json("closeness", c)));
    run.table(&format!("{stem}_checkpoints"), &CHECK_HEADER, rows);
    let mut curves = Vec::new();
    for (t, pts) in &rep.curves {
        for (n, v) in pts {
            curves.push(vec![r(t), i(n), r(v), json!(rat_to_f64(v))]);
        }
    }
    run.table(&format!("{stem}_curves"), &CURVE_HEADER, curves);
    let implication: Vec<Value> = rep
        .implication
        .iter()
        .map(|row| json!({ "n": i(&row.n), "t": r(&row.t), "alphaLo": r(&row.alpha_lo), "plain": r(&row.plain), "slack": r(&row.slack), "holds": row.holds }))
        .collect();
    let estimates: Vec<Value> = rep.estimates.iter().map(|(t, lo, hi)| json!({ "t": r(t), "min": r(lo), "max": r(hi) })).collect();
    json!({
        "verdict": rep.verdict.label(),
        "t0": r(&rep.t0),
        "tGrid": rep.t_grid.iter().map(r).collect::<Vec<_>>(),
        "horizon": i(&rep.horizon),
        "alpha": rep.alpha,
        "separationPassed": rep.separation.iter().filter(|c| c.pass).count(),
        "separationChecks": rep.separation.len(),
        "closenessPassed": rep.closeness.iter().filter(|c| c.pass).count(),
        "closenessChecks": rep.closeness.len(),
        "implication": implication,
        "estimates": estimates,
        "witnessTimes": rep.witness_times.iter().map(i).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use shiftlab_core::symbolic::stream::StreamBuilder;

    #[test]
    fn rle_round_trip() {
        let mut b = StreamBuilder::one_sided();
        b.push_word(&Word::from("0110"));
        b.push_periodic(Cycle::from_word(&Word::from("001")), &Int::from(1000), Int::from(3));
        b.push_word(&Word::from("1"));
        let x = b.finish(Cycle::from_word(&Word::from("01"))).unwrap();
        let mut b = StreamBuilder::two_sided(Cycle::from_word(&Word::from("10")), Int::from(0), Int::from(-5));
        b.push_word(&Word::from("111"));
        let y = b.finish(Cycle::from_word(&Word::from("0"))).unwrap();
        for (s, lo) in [(x, 1i64), (y, -40)] {
            let back = parse_rle(&stream_rle(&s, 2).unwrap()).unwrap();
            assert_eq!(back.side(), s.side());
            let at = Int::from(lo);
            assert_eq!(back.window(&at, 1200).unwrap(), s.window(&at, 1200).unwrap());
        }
        let p = SymbolStream::periodic(Side::TwoSided, &Word::from("011")).unwrap();
        let back = parse_rle(&stream_rle(&p, 2).unwrap()).unwrap();
        assert_eq!(back.window(&Int::from(-7), 20).unwrap(), p.window(&Int::from(-7), 20).unwrap());
    }

    #[test]
    fn csv_cells_are_quoted() {
        assert_eq!(csv_cell(&json!("a,b")), "\"a,b\"");
        assert_eq!(csv_cell(&json!(true)), "true");
        assert_eq!(csv_cell(&Value::Null), "");
    }
}
