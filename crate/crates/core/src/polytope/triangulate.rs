use std::collections::{BTreeSet, HashMap};

use super::linalg::affine_dimension;
use super::vertices::active_set;
use super::{centroid, enumerate_vertices, HPolytope, Simplex, Vertex};
use crate::error::Result;
use crate::rational::Rational;

/// Triangulates a bounded polytope by coning from each face's vertex
/// centroid over a triangulation of the face's facets, recursively. Faces
/// that are already simplices are emitted as-is.
///
/// Flat or empty polytopes give an empty list.
pub fn triangulate(p: &HPolytope) -> Result<Vec<Simplex>> {
    let verts = enumerate_vertices(p)?;
    let d = p.dim();
    let points: Vec<&[Rational]> = verts.iter().map(|v| v.coords.as_slice()).collect();
    if affine_dimension(&points) != Some(d) {
        return Ok(Vec::new());
    }
    let tight: Vec<BTreeSet<usize>> = {
        let mut t = vec![BTreeSet::new(); p.halfspaces().len()];
        for (vi, v) in verts.iter().enumerate() {
            for h in active_set(p, v) {
                t[h].insert(vi);
            }
        }
        t
    };
    let mut tri = FaceTriangulator {
        verts: &verts,
        tight: &tight,
        memo: HashMap::new(),
    };
    let all: Vec<usize> = (0..verts.len()).collect();
    let cells = tri.face(&all, d);
    Ok(cells
        .into_iter()
        .map(|pts| Simplex::new(pts.into_iter().map(Vertex::new).collect()))
        .collect())
}

type Cell = Vec<Vec<Rational>>;

struct FaceTriangulator<'a> {
    verts: &'a [Vertex],
    tight: &'a [BTreeSet<usize>],
    memo: HashMap<Vec<usize>, Vec<Cell>>,
}

impl FaceTriangulator<'_> {
    fn face(&mut self, face: &[usize], k: usize) -> Vec<Cell> {
        if let Some(cached) = self.memo.get(face) {
            return cached.clone();
        }
        let out = if face.len() == k + 1 {
            vec![face.iter().map(|&i| self.verts[i].coords.clone()).collect()]
        } else {
            let members: BTreeSet<usize> = face.iter().copied().collect();
            let mut subfaces = BTreeSet::new();
            for t in self.tight {
                let sub: Vec<usize> = members.intersection(t).copied().collect();
                if sub.len() < k || sub.len() == face.len() {
                    continue;
                }
                let pts: Vec<&[Rational]> =
                    sub.iter().map(|&i| self.verts[i].coords.as_slice()).collect();
                if affine_dimension(&pts) == Some(k - 1) {
                    subfaces.insert(sub);
                }
            }
            let apex = centroid(face.iter().map(|&i| self.verts[i].coords.as_slice()));
            let mut cells = Vec::new();
            for sub in subfaces {
                for base in self.face(&sub, k - 1) {
                    let mut cell = Vec::with_capacity(k + 1);
                    cell.push(apex.clone());
                    cell.extend(base);
                    cells.push(cell);
                }
            }
            cells
        };
        self.memo.insert(face.to_vec(), out.clone());
        out
    }
}
