//! Min-max normalization of the design matrix, with constant-column removal.

/// A named design matrix: `columns[j]` holds the values of `names[j]`.
#[derive(Debug, Clone)]
pub struct Design {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    /// Columns removed because they were constant across all rows.
    pub removed: Vec<String>,
}

/// Rescale one column to [0, 1]; `None` if the column is constant.
pub fn minmax(values: &[f64]) -> Option<Vec<f64>> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return None;
    }
    let span = max - min;
    Some(values.iter().map(|v| (v - min) / span).collect())
}

/// Min-max normalize every column, dropping (and recording) constant ones.
pub fn normalize_design(names: &[String], columns: &[Vec<f64>]) -> Design {
    let mut out = Design {
        names: Vec::new(),
        columns: Vec::new(),
        removed: Vec::new(),
    };
    for (name, col) in names.iter().zip(columns) {
        match minmax(col) {
            Some(scaled) => {
                out.names.push(name.clone());
                out.columns.push(scaled);
            }
            None => out.removed.push(name.clone()),
        }
    }
    out
}
