//! Dataset files: a header line `inputs=<k>,targets=<m>` followed by one row
//! of `k + m` comma-separated bits per example.

use std::path::Path;

use qperc::dataset::{Dataset, Sample};

use crate::error::{io_error, CliError};

pub fn load(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse(&text).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
}

pub fn parse(text: &str) -> Result<Dataset, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or("empty dataset file")?;
    let (inputs, targets) = parse_header(header).map_err(|m| format!("line {hline}: {m}"))?;
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let bits = line
            .split(',')
            .map(|t| match t.trim() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(format!("line {lineno}: `{other}` is not 0 or 1")),
            })
            .collect::<Result<Vec<u8>, String>>()?;
        if bits.len() != inputs + targets {
            return Err(format!(
                "line {lineno}: expected {} values, found {}",
                inputs + targets,
                bits.len()
            ));
        }
        rows.push(Sample {
            input: bits[..inputs].to_vec(),
            target: bits[inputs..].to_vec(),
        });
    }
    if rows.is_empty() {
        return Err("dataset has no rows".into());
    }
    Dataset::new(inputs, targets, rows).map_err(|e| e.to_string())
}

fn parse_header(line: &str) -> Result<(usize, usize), String> {
    let mut inputs = None;
    let mut targets = None;
    for part in line.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected header `inputs=<k>,targets=<m>`, found `{line}`"))?;
        let v: usize = v.trim().parse().map_err(|_| format!("bad count `{}`", v.trim()))?;
        match k.trim() {
            "inputs" => inputs = Some(v),
            "targets" => targets = Some(v),
            other => return Err(format!("unknown header field `{other}`")),
        }
    }
    match (inputs, targets) {
        (Some(i), Some(t)) if i > 0 && t > 0 => Ok((i, t)),
        _ => Err("header needs positive `inputs` and `targets`".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_file() {
        let d = parse("inputs=2,targets=1\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n").unwrap();
        assert_eq!(d, Dataset::xor());
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        assert_eq!(parse(""), Err("empty dataset file".into()));
        assert!(parse("inputs=2,targets=1\n").unwrap_err().contains("no rows"));
        assert!(parse("inputs=2,targets=1\n0,0,0\n0,2,1").unwrap_err().starts_with("line 3"));
        assert!(parse("inputs=2,targets=1\n\n0,0").unwrap_err().starts_with("line 3"));
        assert!(parse("inputs=2\n0,0").unwrap_err().starts_with("line 1"));
        assert!(parse("in=2,targets=1\n0,0,0").unwrap_err().contains("unknown header"));
    }
}
