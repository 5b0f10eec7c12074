//! Abstract oriented simplices of dimension 0 through 2 and complexes closed
//! under faces.
//!
//! A simplex is a set of vertex identifiers kept in canonical (lexicographic)
//! order together with an orientation sign relative to that order. Face maps
//! are vertex deletions: deleting the `k`-th vertex yields the face opposite
//! to it, with the orientation multiplied by `(-1)^k`.
//!
//! Two simplices compare equal when they span the same vertices; the
//! orientation is an attribute and does not take part in equality, ordering
//! or hashing. This lets a complex act as a set of cells while still
//! reporting orientation clashes.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use thiserror::Error;

/// Opaque vertex identifier. Canonical order is lexicographic.
pub type VertexId = String;

/// Largest simplex dimension supported.
pub const MAX_DIMENSION: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("a simplex needs at least one vertex")]
    Empty,
    #[error("vertex `{0}` appears more than once")]
    DuplicateVertex(VertexId),
    #[error("dimension {0} exceeds the supported maximum of 2")]
    DimensionTooLarge(usize),
    #[error("face index {index} out of range for a {dimension}-simplex")]
    FaceIndexOutOfRange { index: usize, dimension: usize },
    #[error("a 0-simplex has no faces")]
    NoFaces,
    #[error("simplex {0} already present with the opposite orientation")]
    OrientationClash(Simplex),
}

/// Orientation sign against the canonical vertex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    fn times_parity(self, k: usize) -> Self {
        if k.is_multiple_of(2) {
            self
        } else {
            self.flipped()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Simplex {
    vertices: Vec<VertexId>,
    orientation: Orientation,
}

impl Simplex {
    /// Builds a simplex from vertices listed in any order.
    ///
    /// The orientation is the sign of the permutation that sorts the given
    /// list, so `["b", "a"]` yields `{a,b}` with negative orientation.
    pub fn new<I, V>(vertices: I) -> Result<Self, SimplexError>
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        let mut list: Vec<VertexId> = vertices.into_iter().map(Into::into).collect();
        if list.is_empty() {
            return Err(SimplexError::Empty);
        }
        if list.len() > MAX_DIMENSION + 1 {
            return Err(SimplexError::DimensionTooLarge(list.len() - 1));
        }
        // Insertion sort, counting transpositions for the orientation sign.
        let mut swaps = 0usize;
        for i in 1..list.len() {
            let mut j = i;
            while j > 0 && list[j - 1] > list[j] {
                list.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(SimplexError::DuplicateVertex(w[0].clone()));
        }
        Ok(Simplex {
            vertices: list,
            orientation: Orientation::Positive.times_parity(swaps),
        })
    }

    pub fn vertex(id: impl Into<VertexId>) -> Self {
        Simplex {
            vertices: alloc::vec![id.into()],
            orientation: Orientation::Positive,
        }
    }

    pub fn edge(a: impl Into<VertexId>, b: impl Into<VertexId>) -> Result<Self, SimplexError> {
        Self::new([a.into(), b.into()])
    }

    pub fn triangle(
        a: impl Into<VertexId>,
        b: impl Into<VertexId>,
        c: impl Into<VertexId>,
    ) -> Result<Self, SimplexError> {
        Self::new([a.into(), b.into(), c.into()])
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Vertices in canonical order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn contains_vertex(&self, v: &str) -> bool {
        self.vertices.iter().any(|x| x == v)
    }

    /// True if `self` is a proper face of `other` (any codimension).
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.vertices.len() < other.vertices.len()
            && self.vertices.iter().all(|v| other.contains_vertex(v))
    }

    /// Deletes the `k`-th vertex in canonical order.
    pub fn face(&self, k: usize) -> Result<Simplex, SimplexError> {
        let dimension = self.dimension();
        if dimension == 0 {
            return Err(SimplexError::NoFaces);
        }
        if k > dimension {
            return Err(SimplexError::FaceIndexOutOfRange {
                index: k,
                dimension,
            });
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(k);
        Ok(Simplex {
            vertices,
            orientation: self.orientation.times_parity(k),
        })
    }

    /// All codimension-one faces in deletion-index order.
    pub fn faces(&self) -> Result<Vec<Simplex>, SimplexError> {
        if self.dimension() == 0 {
            return Err(SimplexError::NoFaces);
        }
        (0..=self.dimension()).map(|k| self.face(k)).collect()
    }

    /// Replaces vertex identifiers, re-canonicalising the order. The
    /// orientation sign is carried along with the permutation.
    pub fn relabel(&self, mut f: impl FnMut(&str) -> VertexId) -> Result<Simplex, SimplexError> {
        let renamed: Vec<VertexId> = self.vertices.iter().map(|v| f(v)).collect();
        let s = Simplex::new(renamed)?;
        Ok(Simplex {
            orientation: match self.orientation {
                Orientation::Positive => s.orientation,
                Orientation::Negative => s.orientation.flipped(),
            },
            ..s
        })
    }
}

impl PartialEq for Simplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for Simplex {}

impl Hash for Simplex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.vertices.hash(state);
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices.cmp(&other.vertices)
    }
}

/// Vertices joined with `-`, e.g. `a-b-c`.
impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            f.write_str(v)?;
        }
        Ok(())
    }
}

/// Finite set of simplices closed under faces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: BTreeSet<Simplex>,
}

impl SimplicialComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `s` and every iterated face of it. Idempotent.
    ///
    /// Faces that are missing are inserted with positive orientation; faces
    /// already present keep theirs. Only `s` itself is checked for an
    /// orientation clash with an existing member.
    pub fn add_simplex(&mut self, s: Simplex) -> Result<(), SimplexError> {
        if let Some(existing) = self.simplices.get(&s) {
            if existing.orientation != s.orientation {
                return Err(SimplexError::OrientationClash(s));
            }
        }
        let mut pending = alloc::vec![s];
        let mut first = true;
        while let Some(cell) = pending.pop() {
            if cell.dimension() > 0 {
                for face in cell.faces()? {
                    pending.push(face.with_orientation(Orientation::Positive));
                }
            }
            if first {
                first = false;
                self.simplices.replace(cell);
            } else if !self.simplices.contains(&cell) {
                self.simplices.insert(cell);
            }
        }
        Ok(())
    }

    pub fn with_simplex(mut self, s: Simplex) -> Result<Self, SimplexError> {
        self.add_simplex(s)?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    /// The stored member spanning the same vertices as `s`.
    pub fn get(&self, s: &Simplex) -> Option<&Simplex> {
        self.simplices.get(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn of_dimension(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dimension() == d)
    }

    /// Members having `s` as a codimension-one face.
    pub fn cofaces<'a>(&'a self, s: &'a Simplex) -> impl Iterator<Item = &'a Simplex> + 'a {
        self.simplices
            .iter()
            .filter(move |c| c.dimension() == s.dimension() + 1 && s.is_face_of(c))
    }

    /// Every face of every member is a member.
    pub fn is_closed(&self) -> bool {
        self.simplices.iter().all(|s| {
            s.dimension() == 0
                || s.faces()
                    .map(|fs| fs.iter().all(|f| self.simplices.contains(f)))
                    .unwrap_or(false)
        })
    }
}
