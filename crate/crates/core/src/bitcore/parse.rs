use std::path::Path;

use super::{check_width_cap, BooleanFunction, PriorDistribution};
use crate::error::{Error, Result};

/// Parses a named function (`and`, `or`, `xor`, `not`, `maj3`, `const0`,
/// `const1`) or a truth table `tt:n=<k>:hex=<H>` where bit `z` of `H` is
/// `f(z)`.
///
/// The constant functions default to one input bit; `const0:n=<k>` widens them.
pub fn parse_function(spec: &str) -> Result<BooleanFunction> {
    let spec = spec.trim();
    let lower = spec.to_ascii_lowercase();
    match lower.as_str() {
        "and" => return Ok(BooleanFunction::and()),
        "or" => return Ok(BooleanFunction::or()),
        "xor" => return Ok(BooleanFunction::xor()),
        "not" => return Ok(BooleanFunction::not()),
        "maj3" => return Ok(BooleanFunction::majority3()),
        "const0" => return BooleanFunction::constant(1, false),
        "const1" => return BooleanFunction::constant(1, true),
        _ => {}
    }
    if let Some(rest) = lower
        .strip_prefix("const0:n=")
        .map(|r| (r, false))
        .or_else(|| lower.strip_prefix("const1:n=").map(|r| (r, true)))
    {
        let n = parse_width(rest.0)?;
        return BooleanFunction::constant(n, rest.1);
    }
    let Some(rest) = lower.strip_prefix("tt:") else {
        return Err(Error::Parse(format!("unknown function `{spec}`")));
    };
    let (n_part, hex_part) = rest
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected tt:n=<k>:hex=<H>, got `{spec}`")))?;
    let n = n_part
        .strip_prefix("n=")
        .ok_or_else(|| Error::Parse(format!("missing n= in `{spec}`")))
        .and_then(parse_width)?;
    let hex = hex_part
        .strip_prefix("hex=")
        .ok_or_else(|| Error::Parse(format!("missing hex= in `{spec}`")))?;
    let hex = hex.strip_prefix("0x").unwrap_or(hex);
    if hex.is_empty() {
        return Err(Error::Parse("empty hex truth table".into()));
    }
    let len = 1usize << n;
    let mut table = vec![false; len];
    // last digit holds bits 0..4
    for (d, ch) in hex.chars().rev().enumerate() {
        let nibble = ch
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("invalid hex digit `{ch}`")))?;
        for b in 0..4 {
            if nibble >> b & 1 == 1 {
                let z = 4 * d + b;
                if z >= len {
                    return Err(Error::Parse(format!(
                        "hex truth table sets bit {z}, beyond the 2^{n} = {len} entries"
                    )));
                }
                table[z] = true;
            }
        }
    }
    BooleanFunction::new(n, table)
}

fn parse_width(s: &str) -> Result<usize> {
    let n: usize = s
        .parse()
        .map_err(|_| Error::Parse(format!("invalid width `{s}`")))?;
    check_width_cap(n).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(n)
}

/// Parses `uniform`, an inline JSON array, or a path to a JSON array or
/// an `index,probability` CSV file. Sums must be within `1e-12` of one.
pub fn parse_prior(spec: &str, n: usize) -> Result<PriorDistribution> {
    parse_prior_with(spec, n, false)
}

/// [`parse_prior`] with optional renormalization of sums within `1e-6`.
pub fn parse_prior_with(spec: &str, n: usize, renormalize: bool) -> Result<PriorDistribution> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("uniform") {
        return PriorDistribution::uniform(n);
    }
    let values = if spec.starts_with('[') {
        parse_json_array(spec)?
    } else {
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('[');
        if is_json {
            parse_json_array(&text)?
        } else {
            parse_csv(&text, n)?
        }
    };
    if values.len() != 1 << n {
        return Err(Error::Parse(format!(
            "prior has {} entries, expected 2^{n} = {}",
            values.len(),
            1usize << n
        )));
    }
    let built = if renormalize {
        PriorDistribution::renormalized(n, values)
    } else {
        PriorDistribution::new(n, values)
    };
    built.map_err(|e| Error::Parse(e.to_string()))
}

fn parse_json_array(text: &str) -> Result<Vec<f64>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("prior JSON: {e}")))
}

/// Rows `index,probability`; an unparsable first row is taken as a header.
/// Indices not listed get probability zero.
fn parse_csv(text: &str, n: usize) -> Result<Vec<f64>> {
    let len = 1usize << n;
    let mut values = vec![0.0; len];
    let mut seen = vec![false; len];
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("prior CSV: {e}")))?;
        if record.len() != 2 {
            return Err(Error::Parse(format!(
                "prior CSV row {} has {} fields, expected 2",
                line + 1,
                record.len()
            )));
        }
        let index = record[0].parse::<usize>();
        let prob = record[1].parse::<f64>();
        let (index, prob) = match (index, prob) {
            (Ok(i), Ok(p)) => (i, p),
            _ if line == 0 => continue,
            _ => {
                return Err(Error::Parse(format!(
                    "prior CSV row {}: cannot parse `{},{}`",
                    line + 1,
                    &record[0],
                    &record[1]
                )))
            }
        };
        if index >= len {
            return Err(Error::Parse(format!(
                "prior CSV index {index} out of range for n={n}"
            )));
        }
        if std::mem::replace(&mut seen[index], true) {
            return Err(Error::Parse(format!("prior CSV repeats index {index}")));
        }
        values[index] = prob;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn named_functions() {
        let and = parse_function("and").unwrap();
        assert_eq!(and.width(), 2);
        assert_eq!(and.table(), &[false, false, false, true]);
        assert_eq!(parse_function("maj3").unwrap().width(), 3);
        assert_eq!(parse_function("not").unwrap().width(), 1);
        assert!(parse_function("const1").unwrap().eval(0));
        assert_eq!(parse_function("const0:n=4").unwrap().width(), 4);
        assert!(matches!(parse_function("nand"), Err(Error::Parse(_))));
    }

    #[test]
    fn truth_tables() {
        assert_eq!(
            parse_function("tt:n=1:hex=1").unwrap(),
            BooleanFunction::not()
        );
        assert_eq!(
            parse_function("tt:n=2:hex=6").unwrap(),
            BooleanFunction::xor()
        );
        assert_eq!(
            parse_function("tt:n=2:hex=0x8").unwrap(),
            BooleanFunction::and()
        );
        assert_eq!(
            parse_function("tt:n=2:hex=0008").unwrap(),
            BooleanFunction::and()
        );
        let maj = BooleanFunction::majority3();
        assert_eq!(parse_function(&maj.to_spec()).unwrap(), maj);
    }

    #[test]
    fn truth_table_errors() {
        assert!(matches!(
            parse_function("tt:n=1:hex=4"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_function("tt:n=2:hex=g"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_function("tt:n=2:hex="),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_function("tt:n=21:hex=0"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_function("tt:2:6"), Err(Error::Parse(_))));
    }

    #[test]
    fn priors_inline() {
        let u = parse_prior("uniform", 2).unwrap();
        assert_eq!(u.probs(), &[0.25; 4]);
        let d = parse_prior("[0.5,0.5,0,0]", 2).unwrap();
        assert!(!d.has_full_support());
        assert!(matches!(parse_prior("[0.5,0.6]", 1), Err(Error::Parse(_))));
        assert!(parse_prior_with("[0.5,0.5000001]", 1, true).is_ok());
        assert!(matches!(parse_prior("[0.5,0.5]", 2), Err(Error::Parse(_))));
        assert!(matches!(parse_prior("[-0.5,1.5]", 1), Err(Error::Parse(_))));
    }

    #[test]
    fn priors_from_files() {
        let mut csv = tempfile_with("index,probability\n0,0.25\n1,0.75\n");
        assert_eq!(
            parse_prior(csv.path().to_str().unwrap(), 1)
                .unwrap()
                .probs(),
            &[0.25, 0.75]
        );
        csv = tempfile_with("0,0.5\n3,0.5\n");
        assert_eq!(
            parse_prior(csv.path().to_str().unwrap(), 2)
                .unwrap()
                .probs(),
            &[0.5, 0.0, 0.0, 0.5]
        );
        csv = tempfile_with("0,0.5\n0,0.5\n");
        assert!(parse_prior(csv.path().to_str().unwrap(), 1).is_err());
        csv = tempfile_with("0,0.5\n2,0.5\n");
        assert!(parse_prior(csv.path().to_str().unwrap(), 1).is_err());
        let json = tempfile_with("[0.1, 0.9]");
        assert_eq!(
            parse_prior(json.path().to_str().unwrap(), 1)
                .unwrap()
                .probs(),
            &[0.1, 0.9]
        );
        assert!(matches!(
            parse_prior("/nonexistent/prior.csv", 1),
            Err(Error::Io(_))
        ));
    }

    fn tempfile_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }
}
