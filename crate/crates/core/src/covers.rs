//! Finite covers of the rose built from surface 1-skeleta.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{PolygonalityCertificate, SurfaceComplex};
use crate::words::{CyclicWord, Letter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("graph is not folded: two {generator}-edges {dir} vertex {vertex}")]
    NotFolded { generator: u32, vertex: usize, dir: &'static str },
    #[error("edge endpoint {0} out of range")]
    BadVertex(usize),
    #[error("generator {0} out of range")]
    BadGenerator(u32),
    #[error("rank mismatch: cover has rank {cover}, word has rank {word}")]
    RankMismatch { cover: u32, word: u32 },
    #[error("declarative certificates carry no surface")]
    Declarative,
    #[error("certificate does not certify polygonality")]
    NotPolygonal,
}

/// A graph with edges labelled by generators, each label a partial injection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub rank: u32,
    pub num_vertices: usize,
    /// `maps[g-1][tail] = Some(head)`.
    pub maps: Vec<Vec<Option<usize>>>,
}

impl LabeledGraph {
    pub fn new(rank: u32, num_vertices: usize) -> LabeledGraph {
        LabeledGraph { rank, num_vertices, maps: vec![vec![None; num_vertices]; rank as usize] }
    }

    pub fn add_edge(&mut self, generator: u32, tail: usize, head: usize) -> Result<(), CoverError> {
        if generator == 0 || generator > self.rank {
            return Err(CoverError::BadGenerator(generator));
        }
        for v in [tail, head] {
            if v >= self.num_vertices {
                return Err(CoverError::BadVertex(v));
            }
        }
        let map = &mut self.maps[generator as usize - 1];
        match map[tail] {
            Some(h) if h == head => return Ok(()),
            Some(_) => return Err(CoverError::NotFolded { generator, vertex: tail, dir: "leave" }),
            None => {}
        }
        if map.contains(&Some(head)) {
            return Err(CoverError::NotFolded { generator, vertex: head, dir: "enter" });
        }
        map[tail] = Some(head);
        Ok(())
    }

    /// The 1-skeleton of a surface complex.
    pub fn from_complex(s: &SurfaceComplex) -> Result<LabeledGraph, CoverError> {
        let mut g = LabeledGraph::new(s.word().rank(), s.num_vertices());
        for e in s.edges() {
            g.add_edge(e.generator, e.tail, e.head)?;
        }
        Ok(g)
    }

    /// The rose: one vertex with a loop per generator.
    pub fn rose(rank: u32) -> LabeledGraph {
        LabeledGraph { rank, num_vertices: 1, maps: vec![vec![Some(0)]; rank as usize] }
    }
}

/// A finite cover of the rose: every generator acts as a permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverGraph {
    pub rank: u32,
    pub base: usize,
    pub perms: Vec<Vec<usize>>,
}

impl CoverGraph {
    pub fn degree(&self) -> usize {
        self.perms.first().map_or(1, Vec::len)
    }

    /// `v · x` for a single letter.
    pub fn act(&self, v: usize, x: Letter) -> usize {
        let p = &self.perms[x.generator() as usize - 1];
        if x.is_inverse() {
            p.iter().position(|&h| h == v).expect("permutation")
        } else {
            p[v]
        }
    }

    pub fn act_word(&self, v: usize, w: &CyclicWord) -> usize {
        w.letters().iter().fold(v, |u, &x| self.act(u, x))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph cover {\n");
        for v in 0..self.degree() {
            let shape = if v == self.base { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  v{v} [shape={shape}];");
        }
        for (g, p) in self.perms.iter().enumerate() {
            let name = Letter::generator_name(g as u32 + 1);
            for (t, &h) in p.iter().enumerate() {
                let _ = writeln!(out, "  v{t} -> v{h} [label=\"{name}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Completes each partial injection to a permutation by matching free tails
/// to free heads in ascending order.
pub fn stallings_complete(g: &LabeledGraph) -> Result<CoverGraph, CoverError> {
    let n = g.num_vertices;
    let mut perms = Vec::with_capacity(g.maps.len());
    for (gi, map) in g.maps.iter().enumerate() {
        let mut has_in = vec![false; n];
        for h in map.iter().flatten() {
            if std::mem::replace(&mut has_in[*h], true) {
                return Err(CoverError::NotFolded { generator: gi as u32 + 1, vertex: *h, dir: "enter" });
            }
        }
        let mut free_heads = (0..n).filter(|&v| !has_in[v]);
        let perm = map.iter().map(|m| m.unwrap_or_else(|| free_heads.next().expect("counts agree"))).collect();
        perms.push(perm);
    }
    Ok(CoverGraph { rank: g.rank, base: 0, perms })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elevation {
    pub representative: usize,
    pub n_g: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElevationReport {
    pub degree: usize,
    pub elevations: Vec<Elevation>,
    #[serde(rename = "chi_S0", skip_serializing_if = "Option::is_none")]
    pub chi_s0: Option<i64>,
}

/// Orbits of `v ↦ v·w`, one elevation each.
pub fn elevations(c: &CoverGraph, w: &CyclicWord) -> Result<ElevationReport, CoverError> {
    if c.rank != w.rank() {
        return Err(CoverError::RankMismatch { cover: c.rank, word: w.rank() });
    }
    let n = c.degree();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        let mut u = v;
        let mut size = 0;
        while !seen[u] {
            seen[u] = true;
            size += 1;
            u = c.act_word(u, w);
        }
        out.push(Elevation { representative: v, n_g: size });
    }
    Ok(ElevationReport { degree: n, elevations: out, chi_s0: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleSurfaceReport {
    pub degree: usize,
    #[serde(rename = "chi_S0")]
    pub chi_s0: i64,
    pub elevations: Vec<Elevation>,
}

/// Degree of the cover induced by a certified surface and the Euler
/// characteristic `2(χ - m)` of the doubled surface.
pub fn double_surface_report(cert: &PolygonalityCertificate) -> Result<DoubleSurfaceReport, CoverError> {
    let Some(built) = cert.complex() else { return Err(CoverError::Declarative) };
    let s = built.map_err(|_| CoverError::NotPolygonal)?;
    if !cert.is_polygonal() {
        return Err(CoverError::NotPolygonal);
    }
    let cover = stallings_complete(&LabeledGraph::from_complex(&s)?)?;
    let report = elevations(&cover, s.word())?;
    let chi = s.euler_characteristic();
    let m = s.num_faces() as i64;
    Ok(DoubleSurfaceReport { degree: cover.degree(), chi_s0: 2 * (chi - m), elevations: report.elevations })
}
