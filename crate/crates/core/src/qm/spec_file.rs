// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! The line-oriented QualSpec format.
//!
//! ```text
//! # comment
//! series F0 max=20 r=10 scale=100 order=2 landmarks birth=3 puberty=9
//! peak F0 window=2..8
//! zero_until F2 puberty
//! smooth F0 bound=20 from=birth
//! couple F1 F2 lag=2 scale=40 slack=0
//! ```
//!
//! `scale`, `order` and `slack` are optional (100, 2 and 0). Indices may
//! be written as integers or as landmark names of the series concerned.

use std::collections::BTreeMap;

use super::{Coupling, Landmark, Predicate, QmError, QualSpec, SeriesSpec};

pub fn parse_qualspec(text: &str) -> Result<QualSpec, QmError> {
    let mut spec = QualSpec::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| QmError::Parse { line: n + 1, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "series" => spec.series.push(series(&words[1..]).map_err(err)?),
            "peak" => {
                let (name, opts) = head(&words[1..], 1).map_err(err)?;
                let opts = options(opts, &["window"]).map_err(err)?;
                let window = opts
                    .get("window")
                    .ok_or_else(|| err("peak needs window=lo..hi".into()))?;
                let (lo, hi) = window
                    .split_once("..")
                    .ok_or_else(|| err(format!("malformed window `{window}`")))?;
                spec.predicates.push(Predicate::Peak {
                    series: name[0].into(),
                    window: (landmark(lo), landmark(hi)),
                });
            }
            "zero_until" => {
                let (name, rest) = head(&words[1..], 2).map_err(err)?;
                if !rest.is_empty() {
                    return Err(err("zero_until takes a series and an index".into()));
                }
                spec.predicates.push(Predicate::ZeroUntil {
                    series: name[0].into(),
                    until: landmark(name[1]),
                });
            }
            "smooth" => {
                let (name, opts) = head(&words[1..], 1).map_err(err)?;
                let opts = options(opts, &["bound", "from"]).map_err(err)?;
                spec.predicates.push(Predicate::Smooth {
                    series: name[0].into(),
                    bound: required_int(&opts, "bound").map_err(err)?,
                    from: landmark(opts.get("from").map_or("0", String::as_str)),
                });
            }
            "couple" => {
                let (names, opts) = head(&words[1..], 2).map_err(err)?;
                let opts = options(opts, &["lag", "scale", "slack"]).map_err(err)?;
                spec.couplings.push(Coupling {
                    from: names[0].into(),
                    to: names[1].into(),
                    lag: required_int(&opts, "lag").map_err(err)?,
                    scale_pct: required_int(&opts, "scale").map_err(err)?,
                    slack: optional_int(&opts, "slack", 0).map_err(err)?,
                });
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(spec)
}

fn landmark(word: &str) -> Landmark {
    match word.parse() {
        Ok(i) => Landmark::Index(i),
        Err(_) => Landmark::Named(word.to_string()),
    }
}

/// Splits `n` positional words from the `key=value` options.
fn head<'a>(words: &'a [&'a str], n: usize) -> Result<(&'a [&'a str], &'a [&'a str]), String> {
    if words.len() < n || words[..n].iter().any(|w| w.contains('=')) {
        return Err(format!("expected {n} name(s) before options"));
    }
    Ok(words.split_at(n))
}

fn options(words: &[&str], allowed: &[&str]) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{w}`"))?;
        if !allowed.contains(&k) {
            return Err(format!("unknown option `{k}`"));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(format!("option `{k}` given twice"));
        }
    }
    Ok(out)
}

fn optional_int(opts: &BTreeMap<String, String>, key: &str, default: i64) -> Result<i64, String> {
    match opts.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| format!("`{key}` must be an integer, found `{v}`")),
    }
}

fn required_int(opts: &BTreeMap<String, String>, key: &str) -> Result<i64, String> {
    if !opts.contains_key(key) {
        return Err(format!("missing `{key}=`"));
    }
    optional_int(opts, key, 0)
}

fn series(words: &[&str]) -> Result<SeriesSpec, String> {
    let (name, rest) = head(words, 1)?;
    let split = rest.iter().position(|w| *w == "landmarks").unwrap_or(rest.len());
    let opts = options(&rest[..split], &["max", "r", "scale", "order"])?;
    let mut s = SeriesSpec::new(name[0], required_int(&opts, "max")?, required_int(&opts, "r")?);
    s.scale = optional_int(&opts, "scale", 100)?;
    s.order = u8::try_from(optional_int(&opts, "order", 2)?).map_err(|_| "order must be 0, 1 or 2".to_string())?;
    if split < rest.len() {
        for w in &rest[split + 1..] {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| format!("landmark `{w}` needs name=index"))?;
            let i = v
                .parse()
                .map_err(|_| format!("landmark `{k}` needs an integer index"))?;
            s.landmarks.insert(k.to_string(), i);
        }
    }
    s.check().map_err(|e| e.to_string())?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_directives() {
        let spec = parse_qualspec(
            "# follicles\nseries F0 max=20 r=10 landmarks birth=3 puberty=9\nseries F2 max=20 r=10 order=1\n\
             peak F0 window=2..8\nzero_until F2 puberty\nsmooth F0 bound=20 from=birth\ncouple F0 F2 lag=2 scale=40\n",
        )
        .unwrap();
        assert_eq!(spec.series.len(), 2);
        assert_eq!(spec.series[0].landmarks["puberty"], 9);
        assert_eq!(spec.series[1].order, 1);
        assert_eq!(
            spec.predicates[0],
            Predicate::Peak {
                series: "F0".into(),
                window: (Landmark::Index(2), Landmark::Index(8))
            }
        );
        assert_eq!(spec.couplings[0].scale_pct, 40);
        assert_eq!(spec.couplings[0].slack, 0);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_qualspec("series F0 max=5 r=2\n\ncouple F0 F1 lag=x scale=4").unwrap_err();
        assert!(matches!(err, QmError::Parse { line: 3, .. }), "{err:?}");
        let err = parse_qualspec("wibble").unwrap_err();
        assert!(matches!(err, QmError::Parse { line: 1, .. }));
    }
}
