//! Connected-component labelling and largest-BLOB selection.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imaging::BinarySilhouette;

/// Which neighbours of a pixel count as connected to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// N, S, E and W neighbours.
    Four,
    /// All eight neighbours.
    #[default]
    Eight,
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            other => Err(Error::config(format!("connectivity must be 4 or 8, got `{other}`"))),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connectivity::Four => "4",
            Connectivity::Eight => "8",
        })
    }
}

/// Dense component labels: 0 is background, components are `1..=count()`,
/// numbered in raster order of their first pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabels {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentLabels {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    /// Number of components.
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Pixel count of component `label` (1-based).
    pub fn size(&self, label: u32) -> usize {
        self.sizes[label as usize - 1]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Label of the biggest component; ties go to the lowest label, which is
    /// the component whose first raster pixel comes earliest.
    pub fn largest(&self) -> Option<u32> {
        let mut best: Option<(usize, usize)> = None;
        for (i, &size) in self.sizes.iter().enumerate() {
            if best.is_none_or(|(_, s)| size > s) {
                best = Some((i, size));
            }
        }
        best.map(|(i, _)| i as u32 + 1)
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Two-pass union-find labelling.
pub fn connected_components(sil: &BinarySilhouette, connectivity: Connectivity) -> ComponentLabels {
    let (w, h) = (sil.width(), sil.height());
    let mut provisional = vec![0u32; w * h];
    let mut sets = DisjointSet::new();

    for row in 0..h {
        for col in 0..w {
            if !sil.get(row, col) {
                continue;
            }
            let mut label = 0u32;
            let mut join = |n: u32, sets: &mut DisjointSet| {
                if n != 0 {
                    label = if label == 0 { n } else { sets.union(label, n) };
                }
            };
            if col > 0 {
                join(provisional[row * w + col - 1], &mut sets);
            }
            if row > 0 {
                let up = (row - 1) * w;
                join(provisional[up + col], &mut sets);
                if connectivity == Connectivity::Eight {
                    if col > 0 {
                        join(provisional[up + col - 1], &mut sets);
                    }
                    if col + 1 < w {
                        join(provisional[up + col + 1], &mut sets);
                    }
                }
            }
            provisional[row * w + col] = if label == 0 { sets.make() } else { label };
        }
    }

    // Relabel densely in raster order of first appearance.
    let mut dense = vec![0u32; sets.parent.len()];
    let mut sizes = Vec::new();
    let mut labels = provisional;
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = sets.find(*l) as usize;
        if dense[root] == 0 {
            sizes.push(0);
            dense[root] = sizes.len() as u32;
        }
        *l = dense[root];
        sizes[*l as usize - 1] += 1;
    }

    ComponentLabels { width: w, height: h, labels, sizes }
}

/// Keeps only the biggest connected component.
pub fn largest_blob(sil: &BinarySilhouette, connectivity: Connectivity) -> Result<BinarySilhouette> {
    let cc = connected_components(sil, connectivity);
    let keep = cc.largest().ok_or(Error::NoForeground)?;
    let bits = cc.labels.iter().map(|&l| u8::from(l == keep)).collect();
    BinarySilhouette::new(sil.width(), sil.height(), bits)
}
