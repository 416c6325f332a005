//! Model file: a JSON header line followed by K lines of V
//! space-separated probabilities (shortest round-trip decimal form).
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{ModelConfig, TopicMatrix, TopicModel};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::num::Scalar;

pub const MODEL_FILE_VERSION: u32 = 1;

const ROW_SUM_TOLERANCE: f64 = 1e-6;

pub fn save_model<T: Scalar>(model: &TopicModel<T>, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_model_to(model, &mut w)
        .and_then(|_| w.flush().map_err(serde_json::Error::io).map_err(Error::from))
        .map_err(|e| match e {
            Error::Json(j) if j.is_io() => Error::io(path, j.into()),
            other => other,
        })
}

pub fn write_model_to<T: Scalar, W: Write>(model: &TopicModel<T>, mut w: W) -> Result<()> {
    let c = &model.config;
    let header = json!({
        "version": MODEL_FILE_VERSION,
        "K": model.k(),
        "V": model.vocab_size(),
        "alpha": c.alpha,
        "beta": c.beta,
        "iterations": c.iterations,
        "seed": c.seed,
        "corpus_fingerprint": model.corpus_fingerprint,
        "vocabulary": model.vocabulary.words(),
        "final_log_likelihood": model.final_log_likelihood,
    });
    serde_json::to_writer(&mut w, &header)?;
    let io = serde_json::Error::io;
    w.write_all(b"\n").map_err(io)?;
    for row in model.phi.iter_rows() {
        let mut first = true;
        for x in row {
            if !first {
                w.write_all(b" ").map_err(io)?;
            }
            first = false;
            write!(w, "{x}").map_err(io)?;
        }
        w.write_all(b"\n").map_err(io)?;
    }
    Ok(())
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<TopicModel<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_model_from(BufReader::new(file))
}

fn field<'a>(h: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    h.get(name).ok_or_else(|| Error::format(name, "missing"))
}

fn uint(h: &Map<String, Value>, name: &str) -> Result<u64> {
    field(h, name)?
        .as_u64()
        .ok_or_else(|| Error::format(name, "expected a non-negative integer"))
}

fn real(h: &Map<String, Value>, name: &str) -> Result<f64> {
    field(h, name)?
        .as_f64()
        .ok_or_else(|| Error::format(name, "expected a number"))
}

pub fn read_model_from<T: Scalar, R: BufRead>(r: R) -> Result<TopicModel<T>> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::format("header", "file is empty"))?
        .map_err(|e| Error::format("header", e.to_string()))?;
    let header: Value =
        serde_json::from_str(&header_line).map_err(|e| Error::format("header", e.to_string()))?;
    let h = header
        .as_object()
        .ok_or_else(|| Error::format("header", "expected a JSON object"))?;

    let version = uint(h, "version")? as u32;
    if version != MODEL_FILE_VERSION {
        return Err(Error::Version {
            found: version,
            expected: MODEL_FILE_VERSION,
        });
    }
    let k = uint(h, "K")? as usize;
    let v = uint(h, "V")? as usize;
    let alpha = real(h, "alpha")?;
    let beta = real(h, "beta")?;
    if !(alpha > 0.0) {
        return Err(Error::format("alpha", "must be > 0"));
    }
    if !(beta > 0.0) {
        return Err(Error::format("beta", "must be > 0"));
    }
    let iterations = uint(h, "iterations")? as usize;
    let seed = uint(h, "seed")?;
    let corpus_fingerprint = field(h, "corpus_fingerprint")?
        .as_str()
        .ok_or_else(|| Error::format("corpus_fingerprint", "expected a string"))?
        .to_string();
    let words = field(h, "vocabulary")?
        .as_array()
        .ok_or_else(|| Error::format("vocabulary", "expected an array"))?
        .iter()
        .map(|w| {
            w.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::format("vocabulary", "expected strings"))
        })
        .collect::<Result<Vec<_>>>()?;
    if words.len() != v {
        return Err(Error::format(
            "vocabulary",
            format!("{} words but V={v}", words.len()),
        ));
    }
    let vocabulary = Vocabulary::from_words(words)?;
    let final_log_likelihood = real(h, "final_log_likelihood")?;

    let mut rows = Vec::with_capacity(k);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::format(format!("row {i}"), e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        if rows.len() == k {
            return Err(Error::format("rows", format!("more than K={k} rows")));
        }
        let row = line
            .split_ascii_whitespace()
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| Error::format(format!("row {i}"), format!("bad number {s:?}")))
            })
            .collect::<Result<Vec<T>>>()?;
        if row.len() != v {
            return Err(Error::format(
                format!("row {i}"),
                format!("{} values but V={v}", row.len()),
            ));
        }
        if row.iter().any(|x| !(x.as_f64() >= 0.0)) {
            return Err(Error::format(format!("row {i}"), "negative or non-finite probability"));
        }
        let sum: f64 = row.iter().map(|x| x.as_f64()).sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::format(format!("row {i}"), format!("sums to {sum}")));
        }
        rows.push(row);
    }
    if rows.len() != k {
        return Err(Error::format(
            "rows",
            format!("truncated: {} of K={k} rows", rows.len()),
        ));
    }
    let phi = if k == 0 {
        TopicMatrix::zeros(0, v)
    } else {
        TopicMatrix::from_rows(rows)?
    };
    Ok(TopicModel {
        config: ModelConfig {
            k,
            alpha,
            beta,
            iterations,
            seed,
        },
        vocabulary,
        phi,
        corpus_fingerprint,
        final_log_likelihood,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"{"version":1,"K":2,"V":2,"alpha":0.5,"beta":0.01,"iterations":10,"seed":3,"corpus_fingerprint":"abc","vocabulary":["ethics","kant"],"final_log_likelihood":-12.5}
0.9 0.1
0.3 0.7
"#;

    #[test]
    fn reads_hand_written_fixture() {
        let m: TopicModel<f64> = read_model_from(FIXTURE.as_bytes()).unwrap();
        assert_eq!(m.phi.row(0), [0.9, 0.1]);
        assert_eq!(m.phi.row(1), [0.3, 0.7]);
        assert_eq!(m.vocabulary.words(), ["ethics", "kant"]);
        assert_eq!(m.config.seed, 3);
        let m32: TopicModel<f32> = read_model_from(FIXTURE.as_bytes()).unwrap();
        assert_eq!(m32.phi.row(1), [0.3f32, 0.7f32]);
    }

    #[test]
    fn round_trip_is_exact() {
        let m: TopicModel<f64> = read_model_from(FIXTURE.as_bytes()).unwrap();
        let mut phi = m.phi.clone();
        phi.row_mut(0).copy_from_slice(&[1.0 / 3.0, 2.0 / 3.0]);
        let m = TopicModel { phi, ..m };
        let mut buf = Vec::new();
        write_model_to(&m, &mut buf).unwrap();
        let back: TopicModel<f64> = read_model_from(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    fn expect_field(text: &str, field: &str) {
        match read_model_from::<f64, _>(text.as_bytes()) {
            Err(Error::Format { field: f, .. }) => assert_eq!(f, field),
            other => panic!("expected format error on {field}, got {other:?}"),
        }
    }

    #[test]
    fn rejects_corrupt_files() {
        expect_field(&FIXTURE.replace("\"K\":2", "\"K\":\"two\""), "K");
        expect_field(&FIXTURE.replace("\"alpha\":0.5,", ""), "alpha");
        expect_field(&FIXTURE.replace("{\"version\"", "{{\"version\""), "header");
        expect_field(&FIXTURE.replace("0.3 0.7\n", ""), "rows");
        expect_field(&FIXTURE.replace("0.3 0.7", "0.3 0.6"), "row 1");
        expect_field(&FIXTURE.replace("0.3 0.7", "0.3"), "row 1");
        expect_field(&FIXTURE.replace("[\"ethics\",\"kant\"]", "[\"ethics\"]"), "vocabulary");
        assert!(matches!(
            read_model_from::<f64, _>(FIXTURE.replace("\"version\":1", "\"version\":2").as_bytes()),
            Err(Error::Version { found: 2, expected: 1 })
        ));
    }
}
