use std::path::Path;

use crate::error::{Error, Result};

/// Copies columns `x` and `y` of a CSV file (such as a trajectory) into a
/// two-column file for plotting. Returns the number of data rows.
pub fn emit_plot_data(input: &Path, x: &str, y: &str, out: &Path) -> Result<usize> {
    let mut r = csv::Reader::from_path(input)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.into()))
    };
    let (cx, cy) = (col(x)?, col(y)?);
    let mut w = csv::Writer::from_path(out)?;
    w.write_record([x, y])?;
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec?;
        w.write_record([&rec[cx], &rec[cy]])?;
        rows += 1;
    }
    w.flush()?;
    if rows == 0 {
        drop(w);
        let _ = std::fs::remove_file(out);
        return Err(Error::InvalidArgument(format!("{} has no data rows", input.display())));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extracts_columns_and_rejects_bad_input() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("t.csv");
        std::fs::write(&src, "step,x_1,x_2\n0,1,1\n1,2,1\n").unwrap();
        let dst = dir.path().join("p.csv");
        assert_eq!(emit_plot_data(&src, "step", "x_1", &dst).unwrap(), 2);
        assert_eq!(std::fs::read_to_string(&dst).unwrap(), "step,x_1\n0,1\n1,2\n");
        assert!(matches!(
            emit_plot_data(&src, "step", "x_9", &dst),
            Err(Error::MissingColumn(c)) if c == "x_9"
        ));
        std::fs::write(&src, "step,x_1\n").unwrap();
        assert!(emit_plot_data(&src, "step", "x_1", &dst).is_err());
    }
}
