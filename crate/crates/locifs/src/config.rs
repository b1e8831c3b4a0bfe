//! Deserializable description of a local IFS.
//!
//! Euclidean systems on the dyadic grid:
//!
//! ```toml
//! backend = "grid"
//! dimension = 2
//! level = 9
//!
//! [[maps]]
//! linear = [[0.5, 0.0], [0.0, 0.5]]
//! translation = [0.0, 0.0]
//! domain = { type = "box", lo = [0.0, 0.0], hi = [1.0, 1.0] }
//! ```
//!
//! `lipschitz` is optional (defaults to the operator norm). Domains are `full`, `box`,
//! `boxes` (`boxes = [[[x0, y0], [x1, y1]], …]`) or `polygon` (`vertices = [[x, y], …]`).
//! In dimension 1 only the first coordinate of vectors and the `[0][0]` entry of
//! `linear` are read.
//!
//! Sequence-space systems:
//!
//! ```toml
//! backend = "sequence"
//! alphabet = 3
//! window = 16
//! word = "2000222"
//!
//! [[maps]]
//! rule = { type = "prepend", symbol = 0 }
//! domain = { type = "subshift", symbols = [0, 1] }
//! ```
//!
//! Rules are `prepend` or `window` (`prefix`, `coefficients`); domains are `full`,
//! `subshift` or `cylinders` (`words = ["01", "2"]`). The optional `word` is the symbol
//! sequence used by the shadowing commands.

use serde::Deserialize;
use thiserror::Error;

use crate::geometry::{AffineContraction, GeometryError, Region};
use crate::ifs::{IfsError, LocalIfs};
use crate::space::{GridSpace, SeqSpace};
use crate::symbolic::cylinder::{CylinderSet, SymbolicMap};
use crate::symbolic::{parse_digits, SymbolicError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("map {index}: {reason}")]
    BadMap { index: usize, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "backend", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemConfig {
    Grid {
        dimension: u8,
        level: u8,
        maps: Vec<GridMapConfig>,
        #[serde(default)]
        word: Option<String>,
    },
    Sequence {
        alphabet: u8,
        window: u8,
        maps: Vec<SeqMapConfig>,
        #[serde(default)]
        word: Option<String>,
    },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridMapConfig {
    pub linear: [[f64; 2]; 2],
    pub translation: [f64; 2],
    #[serde(default)]
    pub lipschitz: Option<f64>,
    pub domain: GridDomainConfig,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GridDomainConfig {
    Full,
    Box { lo: [f64; 2], hi: [f64; 2] },
    Boxes { boxes: Vec<[[f64; 2]; 2]> },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl GridDomainConfig {
    pub fn region(&self) -> Region {
        match self {
            GridDomainConfig::Full => Region::Full,
            GridDomainConfig::Box { lo, hi } => Region::square(*lo, *hi),
            GridDomainConfig::Boxes { boxes } => Region::Boxes(boxes.iter().map(|b| (b[0], b[1])).collect()),
            GridDomainConfig::Polygon { vertices } => Region::Polygon(vertices.clone()),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeqMapConfig {
    pub rule: SeqRuleConfig,
    pub domain: SeqDomainConfig,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeqRuleConfig {
    Prepend { symbol: u8 },
    Window { prefix: Vec<u8>, coefficients: Vec<u8> },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeqDomainConfig {
    Full,
    Subshift { symbols: Vec<u8> },
    Cylinders { words: Vec<String> },
}

/// A system on either backend.
#[derive(Debug, Clone)]
pub enum System {
    Grid(LocalIfs<GridSpace>),
    Seq(LocalIfs<SeqSpace>),
}

impl System {
    pub fn len(&self) -> usize {
        match self {
            System::Grid(r) => r.len(),
            System::Seq(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SystemConfig {
    pub fn build(&self) -> Result<System, ConfigError> {
        match self {
            SystemConfig::Grid { dimension, level, maps, .. } => {
                let space = GridSpace::new(*dimension, *level)?;
                let mut fs = Vec::with_capacity(maps.len());
                let mut ds = Vec::with_capacity(maps.len());
                for (index, m) in maps.iter().enumerate() {
                    let f = match m.lipschitz {
                        Some(l) => AffineContraction::new(*dimension, m.linear, m.translation, l),
                        None => AffineContraction::with_norm(*dimension, m.linear, m.translation),
                    }
                    .map_err(|e| ConfigError::BadMap { index, reason: e.to_string() })?;
                    fs.push(f);
                    ds.push(m.domain.region().rasterize(*dimension, *level)?);
                }
                Ok(System::Grid(LocalIfs::new(space, fs, ds)?))
            }
            SystemConfig::Sequence { alphabet, window, maps, .. } => {
                let space = SeqSpace::new(*alphabet, *window);
                let mut fs = Vec::with_capacity(maps.len());
                let mut ds = Vec::with_capacity(maps.len());
                for (index, m) in maps.iter().enumerate() {
                    let f = match &m.rule {
                        SeqRuleConfig::Prepend { symbol } if symbol < alphabet => SymbolicMap::Prepend(*symbol),
                        SeqRuleConfig::Prepend { symbol } => {
                            return Err(ConfigError::BadMap { index, reason: format!("symbol {symbol} outside the alphabet") })
                        }
                        SeqRuleConfig::Window { prefix, coefficients } => SymbolicMap::window(prefix.clone(), coefficients.clone())?,
                    };
                    fs.push(f);
                    ds.push(match &m.domain {
                        SeqDomainConfig::Full => CylinderSet::full(*alphabet, *window),
                        SeqDomainConfig::Subshift { symbols } => CylinderSet::subshift(*alphabet, *window, symbols)?,
                        SeqDomainConfig::Cylinders { words } => {
                            let parsed = words.iter().map(|w| parse_digits(w, *alphabet as usize)).collect::<Result<Vec<_>, _>>()?;
                            CylinderSet::from_words(*alphabet, *window, parsed)?
                        }
                    });
                }
                Ok(System::Seq(LocalIfs::new(space, fs, ds)?))
            }
        }
    }

    /// The configured shadowing word, parsed against the number of maps.
    pub fn word(&self) -> Result<Option<Vec<u8>>, ConfigError> {
        let (word, n) = match self {
            SystemConfig::Grid { word, maps, .. } => (word, maps.len()),
            SystemConfig::Sequence { word, maps, .. } => (word, maps.len()),
        };
        word.as_deref().map(|w| parse_digits(w, n)).transpose().map_err(Into::into)
    }
}
