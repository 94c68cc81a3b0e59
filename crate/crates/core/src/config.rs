//! Channel and Kraus-map files.
//!
//! A channel file is either
//!
//! ```json
//! { "d": 2, "transition": [[…], …], "initial": [ … ] }
//! ```
//!
//! with `transition` given as `m` rows of `m` entries or as one flat row-major
//! array of `m²` entries (`initial` is optional and defaults to the stationary
//! law), or
//!
//! ```json
//! { "gilbert": { "epsilon": 0.1, "gamma": 0.3 } }
//! ```
//!
//! A Kraus file is `{ "d": 2, "kraus": [A_0, A_1, …] }` where each operator is
//! a list of rows and each entry is a real number or a `[re, im]` pair.

use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

use crate::channel::{gilbert_channel, MarkovPauliChannel, TransitionMatrix};
use crate::error::{invalid, Error, Result};
use crate::twirl::{CMatrix, KrausMap};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed JSON: {e}")))
}

fn number(v: &Value, field: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => invalid(format!("{field}: expected a finite number, found {v}")),
    }
}

fn numbers(v: &Value, field: &str) -> Result<Vec<f64>> {
    let Some(items) = v.as_array() else {
        return invalid(format!("{field}: expected an array, found {v}"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{field}[{i}]")))
        .collect()
}

pub fn load_channel(path: &Path) -> Result<MarkovPauliChannel> {
    parse_channel(&read(path)?)
}

pub fn parse_channel(text: &str) -> Result<MarkovPauliChannel> {
    let root = parse_json(text)?;
    let Some(obj) = root.as_object() else {
        return invalid("channel config must be a JSON object");
    };
    if let Some(g) = obj.get("gilbert") {
        if obj.contains_key("transition") {
            return invalid("channel config has both \"gilbert\" and \"transition\"");
        }
        let eps = g.get("epsilon").ok_or_else(|| Error::InvalidArgument("gilbert.epsilon is missing".into()))?;
        let gamma = g.get("gamma").ok_or_else(|| Error::InvalidArgument("gilbert.gamma is missing".into()))?;
        return gilbert_channel(number(eps, "gilbert.epsilon")?, number(gamma, "gilbert.gamma")?);
    }
    if let Some(key) = obj.keys().find(|k| !matches!(k.as_str(), "d" | "transition" | "initial")) {
        return invalid(format!("unknown channel config field \"{key}\""));
    }
    let d = obj
        .get("d")
        .ok_or_else(|| Error::InvalidArgument("field \"d\" is missing".into()))?;
    let d = match d.as_u64() {
        Some(d) if d <= u32::MAX as u64 => d as u32,
        _ => return invalid(format!("d: expected a prime, found {d}")),
    };
    let m = (d as usize).saturating_mul(d as usize);
    let t = obj
        .get("transition")
        .ok_or_else(|| Error::InvalidArgument("field \"transition\" is missing".into()))?;
    let Some(items) = t.as_array() else {
        return invalid(format!("transition: expected an array, found {t}"));
    };
    let rows: Vec<Vec<f64>> = if items.iter().all(Value::is_array) {
        items
            .iter()
            .enumerate()
            .map(|(u, row)| numbers(row, &format!("transition[{u}]")))
            .collect::<Result<_>>()?
    } else {
        let flat = numbers(t, "transition")?;
        if flat.len() != m * m {
            return invalid(format!("transition: flat array has {} entries, expected {}", flat.len(), m * m));
        }
        flat.chunks(m).map(<[f64]>::to_vec).collect()
    };
    let transition = TransitionMatrix::new(d, rows)?;
    let initial = obj.get("initial").map(|v| numbers(v, "initial")).transpose()?;
    MarkovPauliChannel::new(transition, initial)
}

/// `"epsilon:gamma"`.
pub fn parse_gilbert_spec(spec: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [e, g] = parts.as_slice() else {
        return invalid(format!("gilbert parameters must look like EPSILON:GAMMA, got \"{spec}\""));
    };
    let parse = |s: &str, name: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("gilbert {name}: cannot parse \"{s}\"")))
    };
    Ok((parse(e, "epsilon")?, parse(g, "gamma")?))
}

/// `"start:step:end"`, inclusive of `end` up to rounding.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("sweep: cannot parse \"{s}\" in \"{spec}\"")))
        })
        .collect::<Result<_>>()?;
    let [start, step, end] = parts.as_slice() else {
        return invalid(format!("sweep must look like START:STEP:END, got \"{spec}\""));
    };
    if !(*step > 0.0) || end < start {
        return invalid(format!("sweep needs STEP > 0 and END ≥ START, got \"{spec}\""));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return invalid(format!("sweep has {count} points; at most 1000000 allowed"));
    }
    Ok((0..count).map(|i| (start + i as f64 * step).min(*end)).collect())
}

pub fn load_kraus(path: &Path) -> Result<KrausMap> {
    parse_kraus(&read(path)?)
}

pub fn parse_kraus(text: &str) -> Result<KrausMap> {
    let root = parse_json(text)?;
    let d = root
        .get("d")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidArgument("field \"d\" is missing or not an integer".into()))?;
    let Some(ops) = root.get("kraus").and_then(Value::as_array) else {
        return invalid("field \"kraus\" is missing or not an array");
    };
    let mut mats = Vec::with_capacity(ops.len());
    for (x, op) in ops.iter().enumerate() {
        let Some(rows) = op.as_array() else {
            return invalid(format!("kraus[{x}]: expected a list of rows"));
        };
        let mut parsed = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let Some(entries) = row.as_array() else {
                return invalid(format!("kraus[{x}][{r}]: expected a row array"));
            };
            let row: Vec<Complex64> = entries
                .iter()
                .enumerate()
                .map(|(c, e)| entry(e, &format!("kraus[{x}][{r}][{c}]")))
                .collect::<Result<_>>()?;
            parsed.push(row);
        }
        mats.push(CMatrix::from_rows(parsed).map_err(|e| Error::InvalidArgument(format!("kraus[{x}]: {e}")))?);
    }
    KrausMap::new(d as u32, mats)
}

fn entry(v: &Value, field: &str) -> Result<Complex64> {
    if v.is_number() {
        return Ok(Complex64::new(number(v, field)?, 0.0));
    }
    let pair = numbers(v, field)?;
    match pair.as_slice() {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => invalid(format!("{field}: expected a number or [re, im]")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gilbert_transition;
    use crate::twirl::pauli_twirl;

    #[test]
    fn nested_and_flat_transitions_agree() {
        let nested = r#"{"d": 2, "transition": [[0.9,0.1,0,0],[0.3,0.7,0,0],[0.5,0,0.5,0],[0.25,0.25,0.25,0.25]]}"#;
        let flat = r#"{"d": 2, "transition": [0.9,0.1,0,0,0.3,0.7,0,0,0.5,0,0.5,0,0.25,0.25,0.25,0.25]}"#;
        assert_eq!(parse_channel(nested).unwrap(), parse_channel(flat).unwrap());
    }

    #[test]
    fn gilbert_config() {
        let ch = parse_channel(r#"{"gilbert": {"epsilon": 0.1, "gamma": 0.3}}"#).unwrap();
        assert_eq!(ch.transition(), &gilbert_transition(0.1, 0.3).unwrap());
    }

    #[test]
    fn explicit_initial() {
        let ch = parse_channel(
            r#"{"d": 2, "transition": [[1,0,0,0],[1,0,0,0],[1,0,0,0],[1,0,0,0]], "initial": [0,0,1,0]}"#,
        )
        .unwrap();
        assert_eq!(ch.initial(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn errors_name_the_field() {
        let msg = |t: &str| parse_channel(t).unwrap_err().to_string();
        assert!(msg(r#"{"d": 2, "transition": [[0.9,0.2,0,0],[1,0,0,0],[1,0,0,0],[1,0,0,0]]}"#).contains("row 0"));
        assert!(msg(r#"{"d": 2, "transition": [[1,0,0,0],[1,0,0],[1,0,0,0],[1,0,0,0]]}"#).contains("row 1"));
        assert!(msg(r#"{"d": 2, "transition": [[1,0,0,0],[1,0,0,0],[1,"x",0,0],[1,0,0,0]]}"#).contains("transition[2][1]"));
        assert!(msg(r#"{"d": 4, "transition": []}"#).contains("prime"));
        assert!(msg(r#"{"transition": []}"#).contains("\"d\""));
        assert!(msg(r#"{"d": 2, "transition": [], "extra": 1}"#).contains("extra"));
        assert!(msg(r#"{"gilbert": {"epsilon": 0.1}}"#).contains("gamma"));
        assert!(msg("not json").contains("malformed"));
    }

    #[test]
    fn spec_parsers() {
        assert_eq!(parse_gilbert_spec("0.1:0.3").unwrap(), (0.1, 0.3));
        assert!(parse_gilbert_spec("0.1").is_err());
        assert!(parse_gilbert_spec("a:0.3").is_err());
        let s = parse_sweep("0:0.1:1").unwrap();
        assert_eq!(s.len(), 11);
        assert_eq!(*s.last().unwrap(), 1.0);
        assert_eq!(parse_sweep("0.2:0.5:1").unwrap(), vec![0.2, 0.7]);
        assert!(parse_sweep("0:0:1").is_err());
        assert!(parse_sweep("1:0.1:0").is_err());
    }

    #[test]
    fn kraus_file() {
        let e: f64 = 0.3;
        let (a, b) = ((1.0 - e).sqrt(), (e / 3.0).sqrt());
        let text = format!(
            r#"{{"d": 2, "kraus": [
                [[{a}, 0], [0, {a}]],
                [[0, {b}], [{b}, 0]],
                [[{b}, 0], [0, {nb}]],
                [[0, [0, {nb}]], [[0, {b}], 0]]
            ]}}"#,
            nb = -b
        );
        let map = parse_kraus(&text).unwrap();
        let p = pauli_twirl(&map);
        for (got, want) in p.iter().zip([1.0 - e, e / 3.0, e / 3.0, e / 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(parse_kraus(r#"{"d": 2, "kraus": [[[0.5, 0], [0, 0.5]]]}"#)
            .unwrap_err()
            .to_string()
            .contains("trace preserving"));
        assert!(parse_kraus(r#"{"d": 2, "kraus": [[[1, 0], [0, [1]]]]}"#)
            .unwrap_err()
            .to_string()
            .contains("kraus[0][1][1]"));
    }
}
