//! CSV observation tables.
//!
//! Count data uses the header `id,count` with the binomial size given as a
//! `# m=10000` comment line (or supplied by the caller); ratio-only data
//! uses `id,cfr`. Optional `s_true` and `label` columns carry simulation
//! truth.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::model::{Label, ObservationSet, Truth};

/// Observations plus the metadata found in `#` comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable {
    pub obs: ObservationSet,
    /// `m` declared by a `# m=` comment, if any.
    pub header_m: Option<u64>,
    /// Every `# key=value` comment, in file order.
    pub meta: Vec<(String, String)>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses an observation table. For count data `m_override` wins over the
/// `# m=` comment; a disagreement is logged as a warning.
pub fn read_observations<R: Read>(mut input: R, m_override: Option<u64>) -> Result<ObservationTable> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut meta = Vec::new();
    let mut header_m = None;
    for (i, line) in text.lines().enumerate() {
        let Some(body) = line.trim_start().strip_prefix('#') else { continue };
        if let Some((k, v)) = body.split_once('=') {
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k == "m" {
                header_m = Some(v.parse::<u64>().map_err(|_| parse_err(i + 1, format!("bad m value {v:?}")))?);
            }
            meta.push((k, v));
        }
    }

    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (id_col, count_col, cfr_col) = (col("id"), col("count"), col("cfr"));
    let (s_col, label_col) = (col("s_true"), col("label"));
    if count_col.is_none() && cfr_col.is_none() {
        return Err(parse_err(1, "header needs a `count` or `cfr` column"));
    }
    let m = match (m_override, header_m) {
        (Some(a), Some(b)) if a != b => {
            log::warn!("m={a} from the command line overrides m={b} from the file header");
            Some(a)
        }
        (a, b) => a.or(b),
    };
    if count_col.is_some() && m.is_none() {
        return Err(parse_err(1, "count data needs m (a `# m=` header line or an explicit value)"));
    }

    let (mut ids, mut counts, mut ratios, mut truth) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |k: usize| rec.get(k).ok_or_else(|| parse_err(line, format!("missing field {}", k + 1)));
        ids.push(match id_col {
            Some(k) => field(k)?.to_string(),
            None => (ids.len() + 1).to_string(),
        });
        if let Some(k) = count_col {
            let raw = field(k)?;
            let c: u64 = raw.parse().map_err(|_| parse_err(line, format!("count is not a nonnegative integer: {raw:?}")))?;
            if c > m.unwrap() {
                return Err(parse_err(line, format!("count {c} exceeds m = {}", m.unwrap())));
            }
            counts.push(c);
        } else {
            let raw = field(cfr_col.unwrap())?;
            let r: f64 = raw.parse().map_err(|_| parse_err(line, format!("cfr is not a number: {raw:?}")))?;
            if !(0.0..=1.0).contains(&r) {
                return Err(parse_err(line, format!("cfr {r} outside [0, 1]")));
            }
            ratios.push(r);
        }
        if let Some(k) = s_col {
            let raw = field(k)?;
            let s: f64 = raw.parse().map_err(|_| parse_err(line, format!("s_true is not a number: {raw:?}")))?;
            let label = match label_col.map(|k| field(k)).transpose()? {
                None | Some("") => None,
                Some(l) => Some(Label::parse(l).ok_or_else(|| parse_err(line, format!("unknown label {l:?}")))?),
            };
            truth.push(Truth { s, label });
        }
    }
    if ids.is_empty() {
        return Err(Error::EmptySample);
    }
    let obs = match count_col {
        Some(_) => ObservationSet::from_counts(m.unwrap(), counts)?,
        None => ObservationSet::from_ratios(ratios)?,
    };
    let mut obs = obs.with_ids(ids)?;
    if s_col.is_some() {
        obs = obs.with_truth(truth)?;
    }
    Ok(ObservationTable { obs, header_m, meta })
}

/// Writes `obs` as CSV. Count data gets a `# m=` line; `meta` pairs are
/// written as further `# key=value` lines. Missing ids become `1..=n`.
pub fn write_observations<W: Write>(obs: &ObservationSet, meta: &[(String, String)], mut out: W) -> Result<()> {
    if let Some(m) = obs.m() {
        writeln!(out, "# m={m}")?;
    }
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let value_col = if obs.m().is_some() { "count" } else { "cfr" };
    let mut header = vec!["id", value_col];
    if obs.truth().is_some() {
        header.extend(["s_true", "label"]);
    }
    w.write_record(&header)?;
    for i in 0..obs.len() {
        let id = obs.ids().map_or_else(|| (i + 1).to_string(), |v| v[i].clone());
        let value = match obs.counts() {
            Some(c) => c[i].to_string(),
            None => fmt_f64(obs.ratio(i)),
        };
        let mut row = vec![id, value];
        if let Some(t) = obs.truth() {
            row.push(fmt_f64(t[i].s));
            row.push(t[i].label.map_or(String::new(), |l| l.as_str().to_string()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_with_header_m() {
        let text = "# m=4\nid,count\na,0\nb,2\nc,4\n";
        let t = read_observations(text.as_bytes(), None).unwrap();
        assert_eq!(t.header_m, Some(4));
        assert_eq!(t.obs.ratios(), vec![0.0, 0.5, 1.0]);
        assert_eq!(t.obs.ids().unwrap(), &["a", "b", "c"]);
    }

    #[test]
    fn flag_overrides_header() {
        let text = "# m=4\nid,count\na,3\n";
        let t = read_observations(text.as_bytes(), Some(6)).unwrap();
        assert_eq!(t.obs.m(), Some(6));
        assert_eq!(t.header_m, Some(4));
    }

    #[test]
    fn ratio_only_data() {
        let t = read_observations("id,cfr\nx,0.25\ny,0.99\n".as_bytes(), None).unwrap();
        assert_eq!(t.obs.m(), None);
        assert_eq!(t.obs.ratios(), vec![0.25, 0.99]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "# m=10\nid,count\na,1\nb,x\n";
        assert!(matches!(read_observations(bad.as_bytes(), None), Err(Error::Parse { line: 4, .. })));
        let big = "# m=10\nid,count\na,11\n";
        assert!(matches!(read_observations(big.as_bytes(), None), Err(Error::Parse { line: 3, .. })));
        assert!(read_observations("id,count\na,1\n".as_bytes(), None).is_err());
        assert!(read_observations("id,value\na,1\n".as_bytes(), None).is_err());
        assert!(matches!(read_observations("# m=3\nid,count\n".as_bytes(), None), Err(Error::EmptySample)));
    }

    #[test]
    fn round_trip_with_truth() {
        let obs = ObservationSet::from_counts(10, vec![1, 9])
            .unwrap()
            .with_truth(vec![
                Truth { s: 0.12, label: Some(Label::Null) },
                Truth { s: 0.93, label: Some(Label::Alternative) },
            ])
            .unwrap();
        let mut buf = Vec::new();
        write_observations(&obs, &[("seed".into(), "7".into())], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# m=10\n# seed=7\nid,count,s_true,label\n1,1,"));
        let back = read_observations(&buf[..], None).unwrap();
        assert_eq!(back.obs.counts(), obs.counts());
        assert_eq!(back.obs.truth(), obs.truth());
        assert_eq!(back.meta[1], ("seed".to_string(), "7".to_string()));
    }
}
