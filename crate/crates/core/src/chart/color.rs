//! Named color catalog and palette sampling.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_CATALOG_SIZE: usize = 595;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColorError {
    #[error("color catalog line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate color name `{0}`")]
    DuplicateName(String),
    #[error("catalog has {0} usable colors, fewer than requested")]
    Exhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NamedColor {
    pub name: String,
    /// `#rrggbb`, lowercase.
    pub hex: String,
}

impl NamedColor {
    pub fn rgb(&self) -> (u8, u8, u8) {
        parse_hex(&self.hex).expect("validated on load")
    }

    /// Relative luminance in [0, 1].
    pub fn luminance(&self) -> f64 {
        let (r, g, b) = self.rgb();
        let lin = |c: u8| {
            let c = f64::from(c) / 255.0;
            if c <= 0.03928 { c / 12.92 } else { ((c + 0.055) / 1.055).powf(2.4) }
        };
        0.2126 * lin(r) + 0.7152 * lin(g) + 0.0722 * lin(b)
    }
}

pub fn parse_hex(s: &str) -> Option<(u8, u8, u8)> {
    let h = s.strip_prefix('#')?;
    if h.len() != 6 || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let c = |i: usize| u8::from_str_radix(&h[i..i + 2], 16).ok();
    Some((c(0)?, c(2)?, c(4)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorCatalog {
    colors: Vec<NamedColor>,
}

impl ColorCatalog {
    /// Parses `name,hex` CSV with a header row.
    pub fn parse(text: &str) -> Result<Self, ColorError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let mut colors = Vec::new();
        let mut names = BTreeSet::new();
        for (i, rec) in reader.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| ColorError::Parse { line, message: e.to_string() })?;
            if rec.len() != 2 {
                return Err(ColorError::Parse { line, message: "expected `name,hex`".into() });
            }
            let name = rec[0].trim().to_string();
            let hex = rec[1].trim().to_ascii_lowercase();
            if name.is_empty() {
                return Err(ColorError::Parse { line, message: "empty name".into() });
            }
            if parse_hex(&hex).is_none() {
                return Err(ColorError::Parse { line, message: format!("bad hex value `{hex}`") });
            }
            if !names.insert(name.clone()) {
                return Err(ColorError::DuplicateName(name));
            }
            colors.push(NamedColor { name, hex });
        }
        Ok(ColorCatalog { colors })
    }

    pub fn bundled() -> Self {
        Self::parse(crate::bundled::COLOR_CATALOG).expect("bundled color catalog parses")
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[NamedColor] {
        &self.colors
    }

    pub fn get(&self, name: &str) -> Option<&NamedColor> {
        self.colors.iter().find(|c| c.name == name)
    }

    /// Draws `k` colors without replacement, with pairwise distinct hex values,
    /// skipping colors too close in luminance to `background_luminance`.
    pub fn sample_palette<R: Rng + ?Sized>(
        &self,
        k: usize,
        background_luminance: f64,
        rng: &mut R,
    ) -> Result<Vec<NamedColor>, ColorError> {
        let mut order: Vec<&NamedColor> = self.colors.iter().collect();
        order.shuffle(rng);
        let mut seen_hex = BTreeSet::new();
        let mut out = Vec::with_capacity(k);
        for c in order {
            if out.len() == k {
                break;
            }
            if (c.luminance() - background_luminance).abs() < MIN_LUMINANCE_GAP {
                continue;
            }
            if seen_hex.insert(c.hex.clone()) {
                out.push(c.clone());
            }
        }
        if out.len() < k {
            return Err(ColorError::Exhausted(out.len()));
        }
        Ok(out)
    }
}

/// Series colors closer than this to the background are skipped.
pub const MIN_LUMINANCE_GAP: f64 = 0.12;
