//! Grid specifications: comma-separated items, each either a number,
//! an inclusive range `start:stop:step`, or a log-spaced range
//! `log:lo:hi:count`.

use crate::CliError;

/// Endpoint snapping tolerance for `start:stop:step`.
const SNAP: f64 = 1e-12;

fn number(s: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("not a finite number: {s:?}")));
    }
    Ok(v)
}

fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || stop < start {
        return Err(CliError::Usage(format!("bad range {start}:{stop}:{step}")));
    }
    let span = (stop - start) / step;
    let count = (span + SNAP).floor() as usize;
    if count > 1_000_000 {
        return Err(CliError::Usage(format!("range {start}:{stop}:{step} has too many points")));
    }
    let mut out: Vec<f64> = (0..=count).map(|i| start + i as f64 * step).collect();
    // Land exactly on the endpoint when it is reached up to rounding.
    if let Some(last) = out.last_mut() {
        if (*last - stop).abs() <= SNAP * step.max(stop.abs()).max(1.0) {
            *last = stop;
        }
    }
    Ok(out)
}

fn log_range(lo: f64, hi: f64, count: f64) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi >= lo) || count < 1.0 || count.fract() != 0.0 {
        return Err(CliError::Usage(format!("bad log range log:{lo}:{hi}:{count}")));
    }
    let count = count as usize;
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[count - 1] = hi;
    Ok(out)
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(number(v)?),
            [a, b, c] => out.extend(range(number(a)?, number(b)?, number(c)?)?),
            ["log", a, b, c] => out.extend(log_range(number(a)?, number(b)?, number(c)?)?),
            _ => return Err(CliError::Usage(format!("cannot parse grid item {item:?}"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_range_with_snapping() {
        let g = parse_grid("0:4:0.1").unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 4.0);
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn lists_and_singletons() {
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("0.1, 0.9").unwrap(), vec![0.1, 0.9]);
        assert_eq!(parse_grid("0:1:0.5,3").unwrap(), vec![0.0, 0.5, 1.0, 3.0]);
        assert!(parse_grid("").unwrap().is_empty());
    }

    #[test]
    fn log_spacing() {
        let g = parse_grid("log:0.1:10:30").unwrap();
        assert_eq!(g.len(), 30);
        assert_eq!((g[0], g[29]), (0.1, 10.0));
        assert!((g[1] / g[0] - g[2] / g[1]).abs() < 1e-12);
    }

    #[test]
    fn malformed() {
        for bad in ["a", "0:1", "1:0:0.1", "0:1:0", "log:0:1:3", "log:1:2:2.5", "nan"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
