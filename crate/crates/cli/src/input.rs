//! Code files, catalog names and channel specifications.

use std::fs;
use std::path::Path;

use qcap_core::codes::{build_catalog, decode_digit_string, CatalogName};
use qcap_core::{Error, Field, FieldVector, PauliChannel, StabilizerCode};

use crate::args::{ChannelArgs, ChannelKind};
use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn field_for(d: Option<u32>) -> Result<Field, CliError> {
    Ok(Field::new(d.unwrap_or(2))?)
}

/// A catalog name, or else a path to a code file.
pub fn load_code(spec: &str, d: Option<u32>) -> Result<StabilizerCode, CliError> {
    if let Ok(name) = CatalogName::parse(spec) {
        return Ok(build_catalog(name, field_for(d)?)?);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "--code `{spec}` is neither a catalog name nor an existing file (see `qcap catalog`)"
        )));
    }
    parse_code_text(&read(path)?, d)
}

fn parse_int(tok: &str, what: &str) -> Result<u32, CliError> {
    tok.parse()
        .map_err(|_| CliError::Usage(format!("code file: {what} `{tok}` is not a nonnegative integer")))
}

/// Header `d n k`, then `n - k` generator lines. A line is either `2n`
/// whitespace-separated digits in interleaved order or one digit string.
pub fn parse_code_text(text: &str, d: Option<u32>) -> Result<StabilizerCode, CliError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Usage("code file is empty".into()))?
        .split_whitespace()
        .collect();
    if header.len() != 3 {
        return Err(CliError::Usage("code file header must be `d n k`".into()));
    }
    let fd = parse_int(header[0], "d")?;
    let n = parse_int(header[1], "n")? as usize;
    let k = parse_int(header[2], "k")? as usize;
    if let Some(d) = d {
        if d != fd {
            return Err(CliError::Usage(format!("--d {d} disagrees with the code file's d = {fd}")));
        }
    }
    if k > n || n == 0 {
        return Err(CliError::Usage(format!("code file: need 0 <= k <= n and n >= 1, got n = {n}, k = {k}")));
    }
    let field = Field::new(fd)?;
    let mut gens = Vec::new();
    for line in lines {
        let v = if line.contains(char::is_whitespace) {
            let mut coords = Vec::with_capacity(2 * n);
            for tok in line.split_whitespace() {
                let c = parse_int(tok, "digit")?;
                if c >= fd {
                    return Err(Error::CoordinateOutOfRange { value: c, modulus: fd as u8 }.into());
                }
                coords.push(c as u8);
            }
            FieldVector::new(field, coords)?
        } else {
            decode_digit_string(field, line)?
        };
        if v.len() != 2 * n {
            return Err(CliError::Usage(format!(
                "code file: generator has {} coordinates, expected 2n = {}",
                v.len(),
                2 * n
            )));
        }
        gens.push(v);
    }
    if gens.len() != n - k {
        return Err(CliError::Usage(format!(
            "code file: found {} generators, expected n - k = {}",
            gens.len(),
            n - k
        )));
    }
    Ok(StabilizerCode::new(field, n, gens, 0)?)
}

/// `d^2` lines `i j prob`, any order, each pair once.
pub fn parse_probs_text(text: &str, field: Field) -> Result<PauliChannel, CliError> {
    let d = field.size();
    let mut probs = vec![None; d * d];
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(CliError::Usage(format!("probs file: expected `i j prob`, got `{line}`")));
        }
        let i = parse_int(toks[0], "i")? as usize;
        let j = parse_int(toks[1], "j")? as usize;
        if i >= d || j >= d {
            return Err(CliError::Usage(format!("probs file: pair ({i}, {j}) outside 0..{d}")));
        }
        let p: f64 = toks[2]
            .parse()
            .map_err(|_| CliError::Usage(format!("probs file: `{}` is not a number", toks[2])))?;
        if probs[i * d + j].replace(p).is_some() {
            return Err(CliError::Usage(format!("probs file: pair ({i}, {j}) listed twice")));
        }
    }
    let probs: Option<Vec<f64>> = probs.into_iter().collect();
    let probs = probs.ok_or_else(|| CliError::Usage(format!("probs file: need all {} pairs", d * d)))?;
    Ok(PauliChannel::new(field, probs)?)
}

pub fn load_channel(args: &ChannelArgs, field: Field) -> Result<PauliChannel, CliError> {
    match args.channel {
        ChannelKind::Depolarizing => {
            if args.probs.is_some() {
                return Err(CliError::Usage("--probs requires --channel custom".into()));
            }
            let p = args
                .p
                .ok_or_else(|| CliError::Usage("--channel depolarizing requires --p".into()))?;
            Ok(PauliChannel::depolarizing(field, p)?)
        }
        ChannelKind::Custom => {
            let path = args
                .probs
                .as_ref()
                .ok_or_else(|| CliError::Usage("--channel custom requires --probs <file>".into()))?;
            parse_probs_text(&read(path)?, field)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_rows_and_strings_agree() {
        let a = parse_code_text("2 3 1\n1 0 1 0 0 0\n1 0 0 0 1 0\n", None).unwrap();
        let b = parse_code_text("# rep3\n2 3 1\n110\n101\n", None).unwrap();
        assert_eq!(a.stabilizer(), b.stabilizer());
        assert_eq!(a.k(), 1);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_code_text("2 3 1\n1 0 1 0 0 0\n", None).is_err());
        assert!(parse_code_text("2 3 1\n1 0 1 0 0\n1 0 0 0 1 0\n", None).is_err());
        assert!(parse_code_text("2 3 1\n1 0 2 0 0 0\n1 0 0 0 1 0\n", None).is_err());
        assert!(parse_code_text("3 2 1\n1 0 1 0\n", Some(2)).is_err());
        assert!(parse_code_text("2 2 0\n1 0 0 0\n0 1 0 0\n", None).is_err());
    }

    #[test]
    fn probs_file() {
        let f = Field::new(2).unwrap();
        let ch = parse_probs_text("0 0 0.7\n0 1 0.1\n1 0 0.1\n1 1 0.1\n", f).unwrap();
        assert_eq!(ch.prob(0, 1), 0.1);
        assert!(parse_probs_text("0 0 0.7\n0 1 0.3\n", f).is_err());
        assert!(parse_probs_text("0 0 0.7\n0 0 0.1\n1 0 0.1\n1 1 0.1\n", f).is_err());
    }
}
