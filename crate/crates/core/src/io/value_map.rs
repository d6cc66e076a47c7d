//! Scalar grids produced by external pass-probability or EPV models.
//!
//! Text format: a header line `"<width> <height>"` followed by
//! `width * height` whitespace-separated values in row-major order. Row 0
//! covers the `y = 0` touchline, column 0 the `x = 0` goal line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::geometry::{FieldSpec, Point2};

pub const MAP_WIDTH: usize = 104;
pub const MAP_HEIGHT: usize = 68;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ValueMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, IoError> {
        let bad = |message: String| IoError::ValueMap { line: 1, message };
        if width == 0 || height == 0 {
            return Err(bad(format!("dimensions must be positive, got {width} x {height}")));
        }
        if values.len() != width * height {
            return Err(bad(format!(
                "expected {} values for {width} x {height}, got {}",
                width * height,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(bad(format!("value at cell {i} is not finite")));
        }
        Ok(Self { width, height, values })
    }

    pub fn uniform(width: usize, height: usize, value: f64) -> Result<Self, IoError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, IoError> {
        let values = (0..height).flat_map(|r| (0..width).map(move |c| (c, r))).map(|(c, r)| f(c, r)).collect();
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[self.index(col, row)]
    }

    /// Field position of the center of `(col, row)`.
    pub fn cell_center(&self, field: &FieldSpec, col: usize, row: usize) -> Point2 {
        Point2::new(
            (col as f64 + 0.5) * field.length / self.width as f64,
            (row as f64 + 0.5) * field.width / self.height as f64,
        )
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, IoError> {
        Self::new(self.width, self.height, self.values.iter().map(|v| v * factor).collect())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(IoError::ValueMap {
            line: 1,
            message: "missing header".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let dim = |s: &str| s.parse::<usize>().ok().filter(|&v| v > 0);
        let (width, height) = match dims.as_slice() {
            [w, h] => match (dim(w), dim(h)) {
                (Some(w), Some(h)) => (w, h),
                _ => {
                    return Err(IoError::ValueMap {
                        line: hline + 1,
                        message: format!("bad dimensions `{header}`"),
                    })
                }
            },
            _ => {
                return Err(IoError::ValueMap {
                    line: hline + 1,
                    message: "header must be `<width> <height>`".into(),
                })
            }
        };
        let mut values = Vec::with_capacity(width * height);
        for (i, line) in lines {
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| IoError::ValueMap {
                    line: i + 1,
                    message: format!("`{tok}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(IoError::ValueMap {
                        line: i + 1,
                        message: format!("`{tok}` is not finite"),
                    });
                }
                values.push(v);
            }
        }
        Self::new(width, height, values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
        Self::parse(&text)
    }

    /// One grid row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.width, self.height);
        for row in self.values.chunks(self.width) {
            let mut first = true;
            for v in row {
                if !first {
                    s.push(' ');
                }
                first = false;
                write!(s, "{v}").expect("write to string");
            }
            s.push('\n');
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IoError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| IoError::file(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let m = ValueMap::from_fn(4, 3, |c, r| c as f64 * 0.1 + r as f64).unwrap();
        let back = ValueMap::parse(&m.to_text()).unwrap();
        assert_eq!(m, back);
        assert_eq!(back.get(3, 2), 3.0 * 0.1 + 2.0);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = ValueMap::parse("2 1\n0.5 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(ValueMap::parse("2 2\n1 2 3\n").is_err());
        assert!(ValueMap::parse("0 2\n").is_err());
        assert!(ValueMap::parse("").is_err());
    }

    #[test]
    fn cell_centers_cover_field() {
        let m = ValueMap::uniform(MAP_WIDTH, MAP_HEIGHT, 0.0).unwrap();
        let f = FieldSpec::default();
        let first = m.cell_center(&f, 0, 0);
        let last = m.cell_center(&f, MAP_WIDTH - 1, MAP_HEIGHT - 1);
        assert!((first.x - 0.5 * 105.0 / 104.0).abs() < 1e-12);
        assert!((last.y - (68.0 - 0.5)).abs() < 1e-12);
    }
}
