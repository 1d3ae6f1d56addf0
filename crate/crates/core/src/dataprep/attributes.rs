//! Per-item metadata attributes, read from CSV with an `id` column followed
//! by one column per attribute. Empty cells mean the value is missing.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeTable {
    ids: Vec<String>,
    attributes: Vec<String>,
    values: Vec<Option<String>>, // n x attributes, row-major
}

impl AttributeTable {
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    /// Values of one attribute across items, in row order.
    pub fn column(&self, attr: usize) -> Vec<Option<String>> {
        (0..self.n())
            .map(|i| self.values[i * self.attributes.len() + attr].clone())
            .collect()
    }

    /// Parse `id,attr1,attr2,...` rows; the row order defines item order.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .ok_or(Error::Parse {
                row: 1,
                col: 1,
                msg: "empty file".into(),
            })??;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || !cols[0].eq_ignore_ascii_case("id") {
            return Err(Error::Parse {
                row: 1,
                col: 1,
                msg: "header must be `id,attr1,...`".into(),
            });
        }
        let attributes: Vec<String> = cols[1..].iter().map(|s| s.to_string()).collect();
        let mut ids = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != attributes.len() + 1 {
                return Err(Error::Parse {
                    row: lineno + 2,
                    col: fields.len(),
                    msg: format!(
                        "expected {} fields, found {}",
                        attributes.len() + 1,
                        fields.len()
                    ),
                });
            }
            ids.push(fields[0].to_string());
            for f in &fields[1..] {
                values.push(if f.is_empty() {
                    None
                } else {
                    Some(f.to_string())
                });
            }
        }
        if ids.is_empty() {
            return Err(Error::InvalidInput("attribute table has no rows".into()));
        }
        Ok(Self {
            ids,
            attributes,
            values,
        })
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_missing_cells() {
        let csv = "id,year,dorm\nalice,2008,\nbob,,west\ncarol,2008,west\n";
        let t = AttributeTable::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.attributes(), &["year".to_string(), "dorm".to_string()]);
        assert_eq!(
            t.column(0),
            vec![Some("2008".into()), None, Some("2008".into())]
        );
        assert_eq!(t.column(1), vec![None, Some("west".into()), Some("west".into())]);
    }

    #[test]
    fn rejects_bad_header_and_ragged_rows() {
        assert!(AttributeTable::read_csv("name,year\nx,1\n".as_bytes()).is_err());
        assert!(AttributeTable::read_csv("id,year\nx\n".as_bytes()).is_err());
    }
}
