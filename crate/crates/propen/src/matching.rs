//! Matched-dataset construction.
//!
//! An ordered pair (i, j) qualifies when the squared L2 distance between the
//! designs is at most `delta_x` (note: SQUARED distance, not plain distance)
//! and the property gap g(x_j) - g(x_i) lies in the half-open interval
//! `(delta_y_lower, delta_y]`. All qualifying pairs are kept; the search is a
//! plain double loop, which is fine for the few-thousand-design datasets this
//! crate targets.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// A set of designs (rows) with optional scalar property values.
#[derive(Debug, Clone)]
pub struct DesignSet {
    designs: Array2<f64>,
    properties: Option<Array1<f64>>,
}

impl DesignSet {
    pub fn new(designs: Array2<f64>, properties: Array1<f64>) -> Result<Self> {
        if properties.len() != designs.nrows() {
            return Err(Error::DimensionMismatch {
                expected: designs.nrows(),
                actual: properties.len(),
            });
        }
        if properties.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("property values".into()));
        }
        Self::check_designs(&designs)?;
        Ok(Self { designs, properties: Some(properties) })
    }

    /// A design set whose properties have not been assigned yet.
    pub fn unlabeled(designs: Array2<f64>) -> Result<Self> {
        Self::check_designs(&designs)?;
        Ok(Self { designs, properties: None })
    }

    fn check_designs(designs: &Array2<f64>) -> Result<()> {
        if designs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design coordinates".into()));
        }
        Ok(())
    }

    pub fn with_properties(self, properties: Array1<f64>) -> Result<Self> {
        Self::new(self.designs, properties)
    }

    pub fn len(&self) -> usize {
        self.designs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.designs.ncols()
    }

    pub fn design(&self, i: usize) -> ArrayView1<'_, f64> {
        self.designs.row(i)
    }

    pub fn designs(&self) -> &Array2<f64> {
        &self.designs
    }

    pub fn properties(&self) -> Result<&Array1<f64>> {
        self.properties.as_ref().ok_or(Error::MissingProperties)
    }

    pub fn has_properties(&self) -> bool {
        self.properties.is_some()
    }

    /// Row subset in the given index order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange { index: i, len: self.len() });
            }
        }
        let designs = self.designs.select(Axis(0), indices);
        let properties = self.properties.as_ref().map(|p| p.select(Axis(0), indices));
        Ok(Self { designs, properties })
    }

    /// Writes the `x0,...,x{m-1},y` CSV schema.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim()).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        writer.write_record(&header)?;
        for i in 0..self.len() {
            let mut record: Vec<String> = self.designs.row(i).iter().map(|v| v.to_string()).collect();
            match &self.properties {
                Some(p) => record.push(p[i].to_string()),
                None => record.push(String::new()),
            }
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Reads the `x0,...,x{m-1},y` CSV schema. An empty `y` column yields an
    /// unlabeled set.
    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(r);
        let header = reader.headers()?.clone();
        if header.is_empty() || header.iter().last() != Some("y") {
            return Err(Error::MalformedRows {
                lines: vec![1],
                reason: "expected header x0,...,x{m-1},y".into(),
            });
        }
        let dim = header.len() - 1;
        let mut rows: Vec<f64> = Vec::new();
        let mut props: Vec<f64> = Vec::new();
        let mut any_missing = false;
        let mut bad_lines = Vec::new();
        for (k, record) in reader.records().enumerate() {
            let record = record?;
            let line = k + 2;
            if record.len() != dim + 1 {
                bad_lines.push(line);
                continue;
            }
            let mut ok = true;
            for field in record.iter().take(dim) {
                match field.trim().parse::<f64>() {
                    Ok(v) => rows.push(v),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                rows.truncate(props.len() * dim);
                bad_lines.push(line);
                continue;
            }
            let y = record.get(dim).unwrap_or("").trim();
            if y.is_empty() {
                any_missing = true;
                props.push(f64::NAN);
            } else {
                match y.parse::<f64>() {
                    Ok(v) => props.push(v),
                    Err(_) => {
                        rows.truncate((props.len()) * dim);
                        bad_lines.push(line);
                        continue;
                    }
                }
            }
        }
        if !bad_lines.is_empty() {
            return Err(Error::MalformedRows { lines: bad_lines, reason: "unparseable design row".into() });
        }
        let n = props.len();
        let designs = Array2::from_shape_vec((n, dim), rows)
            .map_err(|e| Error::MalformedRows { lines: vec![], reason: e.to_string() })?;
        if any_missing {
            DesignSet::unlabeled(designs)
        } else {
            DesignSet::new(designs, Array1::from_vec(props))
        }
    }
}

/// Matching thresholds. `delta_x` bounds the SQUARED L2 distance; the
/// property gap must fall in `(delta_y_lower, delta_y]`.
#[derive(Debug, Clone, Copy)]
pub struct MatchConfig {
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_y_lower: f64,
}

impl MatchConfig {
    pub fn new(delta_x: f64, delta_y: f64, delta_y_lower: f64) -> Result<Self> {
        if !(delta_x > 0.0) {
            return Err(Error::InvalidConfig("delta_x must be > 0".into()));
        }
        if !(delta_y_lower >= 0.0 && delta_y_lower < delta_y) {
            return Err(Error::InvalidConfig("need 0 <= delta_y_lower < delta_y".into()));
        }
        Ok(Self { delta_x, delta_y, delta_y_lower })
    }
}

/// Ordered (source, target) index pairs into a [`DesignSet`].
#[derive(Debug)]
pub struct MatchedDataset<'a> {
    data: &'a DesignSet,
    pairs: Vec<(usize, usize)>,
}

impl<'a> MatchedDataset<'a> {
    pub fn data(&self) -> &'a DesignSet {
        self.data
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Target designs matched to `seed_index` (may be empty).
    pub fn matches_of(&self, seed_index: usize) -> Result<Vec<ArrayView1<'a, f64>>> {
        Ok(self
            .match_indices_of(seed_index)?
            .into_iter()
            .map(|j| self.data.design(j))
            .collect())
    }

    pub fn match_indices_of(&self, seed_index: usize) -> Result<Vec<usize>> {
        if seed_index >= self.data.len() {
            return Err(Error::IndexOutOfRange { index: seed_index, len: self.data.len() });
        }
        Ok(self
            .pairs
            .iter()
            .filter(|(i, _)| *i == seed_index)
            .map(|&(_, j)| j)
            .collect())
    }

    /// Mean of the seed's matched targets.
    pub fn match_mean(&self, seed_index: usize) -> Result<Array1<f64>> {
        let indices = self.match_indices_of(seed_index)?;
        if indices.is_empty() {
            return Err(Error::UnmatchedSeed { index: seed_index });
        }
        let mut mean = Array1::zeros(self.data.dim());
        for &j in &indices {
            mean += &self.data.design(j);
        }
        mean /= indices.len() as f64;
        Ok(mean)
    }

    /// `E[||x' - mean(x')||^2]` over the seed's matched targets.
    pub fn match_variance(&self, seed_index: usize) -> Result<f64> {
        let indices = self.match_indices_of(seed_index)?;
        if indices.is_empty() {
            return Err(Error::UnmatchedSeed { index: seed_index });
        }
        let mean = self.match_mean(seed_index)?;
        let total: f64 = indices
            .iter()
            .map(|&j| {
                let diff = &self.data.design(j) - &mean;
                diff.iter().map(|d| d * d).sum::<f64>()
            })
            .sum();
        Ok(total / indices.len() as f64)
    }

    /// Writes the `source_index,target_index` CSV schema.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(["source_index", "target_index"])?;
        for (i, j) in &self.pairs {
            writer.write_record([i.to_string(), j.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

pub fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Enumerates all qualifying ordered pairs, lexicographically by (i, j).
pub fn build_matched_dataset<'a>(data: &'a DesignSet, config: &MatchConfig) -> Result<MatchedDataset<'a>> {
    let props = data.properties()?;
    let n = data.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        let xi = data.design(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let gap = props[j] - props[i];
            if gap <= config.delta_y_lower || gap > config.delta_y {
                continue;
            }
            if squared_distance(xi, data.design(j)) <= config.delta_x {
                pairs.push((i, j));
            }
        }
    }
    Ok(MatchedDataset { data, pairs })
}
