//! Line-oriented text format for measurement records.
//!
//! ```text
//! retrotomo-record 1
//! qubits 1
//! events 10
//! bins sparse            # or an integer bin count
//! dist exp 0.39269908169872414   # `normal <σ>`, `uniform` or `none`
//! phi 0
//! seed 42                # or `none`
//! truth 0.6 0 0.1 -0.2 0.1 0.2 0.4 0   # optional, row-major (re, im) pairs
//! end
//! axis(z) 1 3
//! axis(z) 0 2
//! eq(0.12837) 1 1
//! axis(z)*eq(1.5) 10 1
//! ```
//!
//! Each event line is `factors outcome multiplicity`. Factors are joined with
//! `*`, qubit 0 first; `axis(z)` is a z-axis factor and `eq(a)` an equatorial
//! factor at effective angle `a` radians. `outcome` has one bit per qubit: on
//! an axis factor `1` means up, on an equatorial factor `1` means the click
//! was attributed to M_a (and `0` to its complement M_{a+π}). Floats are
//! written in shortest round-trip form, so write→read is lossless. Blank
//! lines and lines starting with `#` are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, TomographyError};
use crate::linalg::{CMatrix, DensityMatrix};

use super::phases::PhaseDistribution;
use super::record::{Event, Factor, MeasurementRecord, RecordMeta};

const MAGIC: &str = "retrotomo-record 1";

pub fn write_record<W: Write>(record: &MeasurementRecord, mut out: W) -> std::io::Result<()> {
    let meta = record.meta();
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "qubits {}", record.qubits())?;
    writeln!(out, "events {}", record.total_events())?;
    match record.bins() {
        Some(nb) => writeln!(out, "bins {nb}")?,
        None => writeln!(out, "bins sparse")?,
    }
    match meta.distribution {
        Some(d) => match d.param() {
            Some(p) => writeln!(out, "dist {} {p}", d.kind())?,
            None => writeln!(out, "dist {}", d.kind())?,
        },
        None => writeln!(out, "dist none")?,
    }
    writeln!(out, "phi {}", meta.phi)?;
    match meta.seed {
        Some(s) => writeln!(out, "seed {s}")?,
        None => writeln!(out, "seed none")?,
    }
    if let Some(truth) = &meta.truth {
        let m = truth.matrix();
        write!(out, "truth")?;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                write!(out, " {} {}", m[(r, c)].re, m[(r, c)].im)?;
            }
        }
        writeln!(out)?;
    }
    writeln!(out, "end")?;
    for e in record.events() {
        let tokens: Vec<String> = e
            .factors
            .iter()
            .map(|f| match f {
                Factor::Axis { .. } => "axis(z)".to_string(),
                Factor::Equator { angle, .. } => format!("eq({angle})"),
            })
            .collect();
        let bits: String = e
            .factors
            .iter()
            .map(|f| if f.outcome_bit() { '1' } else { '0' })
            .collect();
        writeln!(out, "{} {} {}", tokens.join("*"), bits, e.multiplicity)?;
    }
    Ok(())
}

pub fn record_to_string(record: &MeasurementRecord) -> String {
    let mut buf = Vec::new();
    write_record(record, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("record text is ASCII")
}

pub fn save_record(record: &MeasurementRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| TomographyError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_record(record, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| TomographyError::io(path, e))
}

pub fn load_record(path: impl AsRef<Path>) -> Result<MeasurementRecord> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| TomographyError::io(path, e))?;
    read_record(BufReader::new(file))
}

pub fn parse_record(text: &str) -> Result<MeasurementRecord> {
    read_record(text.as_bytes())
}

fn parse_err(line: usize, message: impl Into<String>) -> TomographyError {
    TomographyError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from '{tok}'")))
}

pub fn read_record<R: Read>(input: R) -> Result<MeasurementRecord> {
    let reader = BufReader::new(input);
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });
    let mut next = || -> Result<Option<(usize, String)>> {
        match lines.next() {
            None => Ok(None),
            Some((n, Ok(s))) => Ok(Some((n, s.trim().to_string()))),
            Some((n, Err(e))) => Err(parse_err(n, e.to_string())),
        }
    };

    match next()? {
        Some((_, l)) if l == MAGIC => {}
        Some((n, l)) => return Err(parse_err(n, format!("expected '{MAGIC}', found '{l}'"))),
        None => return Err(parse_err(0, "empty record")),
    }

    let mut qubits: Option<usize> = None;
    let mut declared_events: Option<u64> = None;
    let mut bins: Option<Option<usize>> = None;
    let mut meta = RecordMeta::default();
    let mut truth_values: Option<(usize, Vec<f64>)> = None;

    loop {
        let (n, line) = next()?.ok_or_else(|| parse_err(0, "header not terminated by 'end'"))?;
        if line == "end" {
            break;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or_default();
        match key {
            "qubits" => qubits = Some(parse_num(toks.next(), n, "qubit count")?),
            "events" => declared_events = Some(parse_num(toks.next(), n, "event count")?),
            "bins" => {
                bins = Some(match toks.next() {
                    Some("sparse") => None,
                    other => Some(parse_num(other, n, "bin count")?),
                })
            }
            "dist" => {
                let kind = toks.next().ok_or_else(|| parse_err(n, "missing distribution"))?;
                meta.distribution = if kind == "none" {
                    None
                } else {
                    let param = match toks.next() {
                        Some(t) => Some(parse_num::<f64>(Some(t), n, "distribution parameter")?),
                        None => None,
                    };
                    Some(PhaseDistribution::from_parts(kind, param).map_err(|e| parse_err(n, e.to_string()))?)
                };
            }
            "phi" => meta.phi = parse_num(toks.next(), n, "phi")?,
            "seed" => {
                meta.seed = match toks.next() {
                    Some("none") => None,
                    other => Some(parse_num(other, n, "seed")?),
                }
            }
            "truth" => {
                let vals = toks
                    .map(|t| parse_num::<f64>(Some(t), n, "truth entry"))
                    .collect::<Result<Vec<_>>>()?;
                truth_values = Some((n, vals));
                continue;
            }
            other => return Err(parse_err(n, format!("unknown header key '{other}'"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(n, "trailing tokens in header line"));
        }
    }

    let qubits = qubits.ok_or_else(|| parse_err(0, "header lacks 'qubits'"))?;
    let bins = bins.ok_or_else(|| parse_err(0, "header lacks 'bins'"))?;
    if qubits == 0 || qubits > 8 {
        return Err(parse_err(0, format!("unsupported qubit count {qubits}")));
    }
    let dim = 1usize << qubits;

    if let Some((n, vals)) = truth_values {
        if vals.len() != 2 * dim * dim {
            return Err(parse_err(n, format!("truth needs {} numbers, got {}", 2 * dim * dim, vals.len())));
        }
        let m = CMatrix::from_row_iterator(
            dim,
            dim,
            vals.chunks(2).map(|p| Complex64::new(p[0], p[1])),
        );
        meta.truth = Some(DensityMatrix::new(m).map_err(|e| parse_err(n, e.to_string()))?);
    }

    let mut events = Vec::new();
    while let Some((n, line)) = next()? {
        let mut toks = line.split_whitespace();
        let factors_tok = toks.next().ok_or_else(|| parse_err(n, "empty event line"))?;
        let bits = toks.next().ok_or_else(|| parse_err(n, "missing outcome bits"))?;
        let multiplicity: u64 = parse_num(toks.next(), n, "multiplicity")?;
        if toks.next().is_some() {
            return Err(parse_err(n, "trailing tokens in event line"));
        }
        let kinds: Vec<&str> = factors_tok.split('*').collect();
        if kinds.len() != qubits || bits.len() != qubits {
            return Err(parse_err(n, format!("event does not have {qubits} factors")));
        }
        let factors = kinds
            .iter()
            .zip(bits.chars())
            .map(|(k, b)| {
                let bit = match b {
                    '0' => false,
                    '1' => true,
                    _ => return Err(parse_err(n, format!("bad outcome bit '{b}'"))),
                };
                if *k == "axis(z)" {
                    Ok(Factor::Axis { up: bit })
                } else if let Some(inner) = k.strip_prefix("eq(").and_then(|s| s.strip_suffix(')')) {
                    Ok(Factor::Equator {
                        angle: parse_num(Some(inner), n, "angle")?,
                        clicked: bit,
                    })
                } else {
                    Err(parse_err(n, format!("unknown factor '{k}'")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        events.push(Event { factors, multiplicity });
    }

    let record = MeasurementRecord::new(qubits, events, bins, meta)?;
    if let Some(declared) = declared_events {
        if declared != record.total_events() {
            return Err(parse_err(
                0,
                format!("header declares {declared} events, body holds {}", record.total_events()),
            ));
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_ginibre_state;
    use crate::measurement::{coarse_grain, simulate_multiqubit_record, simulate_sparse_record};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sparse_and_binned_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_ginibre_state(2, &mut rng);
        let dist = PhaseDistribution::exponential(0.3).unwrap();
        let mut rec = simulate_sparse_record(&rho, 200, &dist, 0.25, &mut rng).unwrap();
        rec.meta_mut().seed = Some(99);
        let text = record_to_string(&rec);
        assert_eq!(parse_record(&text).unwrap(), rec);

        let binned = coarse_grain(&rec, 16).unwrap();
        assert_eq!(parse_record(&record_to_string(&binned)).unwrap(), binned);
    }

    #[test]
    fn two_qubit_round_trip_via_file() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_ginibre_state(4, &mut rng);
        let rec = simulate_multiqubit_record(&rho, 64, &PhaseDistribution::Uniform, &mut rng).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rec.txt");
        save_record(&rec, &path).unwrap();
        assert_eq!(load_record(&path).unwrap(), rec);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_record("").is_err());
        assert!(parse_record("nonsense\n").is_err());
        let header = "retrotomo-record 1\nqubits 1\nevents 2\nbins sparse\ndist uniform\nphi 0\nseed none\nend\n";
        assert!(parse_record(&format!("{header}axis(z) 1 2\n")).is_ok());
        assert!(parse_record(&format!("{header}axis(z) 1 3\n")).is_err());
        assert!(parse_record(&format!("{header}eq(0.5) 1 2\n")).is_err());
        assert!(parse_record(&format!("{header}axis(x) 1 2\n")).is_err());
        assert!(parse_record(&format!("{header}axis(z) 2 2\n")).is_err());
    }

    #[test]
    fn missing_file_reports_path() {
        let err = load_record("/nonexistent/rec.txt").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/rec.txt"));
    }
}
