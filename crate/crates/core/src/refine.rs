//! Common refinement of the per-clique regular subdivisions over the support
//! polytope: each maximal cell is an intersection of coordinate-projection
//! preimages of one cell per clique. The refinement carries, per triangulated
//! simplex vertex, the barycentric linkage into each clique's subdivision
//! needed for subgradients of the objective.

use crate::error::{Error, Result};
use crate::geometry::dd::CutState;
use crate::geometry::{Halfspace, Polytope};
use crate::linalg::{self, vec_sub, Mat};
use crate::scalar::Scalar;
use crate::tent::{AffinePiece, Subdivision, TentFunction};
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct RefinedCell<S> {
    pub polytope: Polytope<S>,
    /// Chosen subdivision cell index, one per clique.
    pub choice: Vec<usize>,
    /// The affine function of the total tent on this cell (ambient space).
    pub piece: AffinePiece<S>,
}

/// Per-vertex linkage: tent value plus, for each clique, the sample indices
/// and barycentric weights of the projected vertex inside the triangulated
/// subdivision cell.
#[derive(Clone, Debug)]
pub struct VertexLink<S> {
    pub value: S,
    pub clique_weights: Vec<Vec<(usize, S)>>,
}

#[derive(Clone, Debug)]
pub struct RefinedSimplex<S> {
    pub vertices: Vec<Vec<S>>,
    pub links: Vec<VertexLink<S>>,
    /// Index of the refined cell this simplex triangulates.
    pub cell: usize,
}

#[derive(Clone, Debug)]
pub struct RefinedComplex<S> {
    pub dim: usize,
    pub cliques: Vec<Vec<usize>>,
    pub support: Polytope<S>,
    pub subdivisions: Vec<Subdivision<S>>,
    pub cells: Vec<RefinedCell<S>>,
    pub simplices: Vec<RefinedSimplex<S>>,
    /// Deduplicated vertices of the refinement: the tent pole locations.
    pub vertex_pool: Vec<Vec<S>>,
}

fn project<S: Scalar>(x: &[S], clique: &[usize]) -> Vec<S> {
    clique.iter().map(|&v| x[v - 1].clone()).collect()
}

/// Lifts a halfspace on the clique coordinates to the ambient space.
fn lift_halfspace<S: Scalar>(h: &Halfspace<S>, clique: &[usize], dim: usize) -> Halfspace<S> {
    let mut a = vec![S::zero(); dim];
    for (i, &v) in clique.iter().enumerate() {
        a[v - 1] = h.a[i].clone();
    }
    Halfspace { a, b: h.b.clone() }
}

fn lift_piece<S: Scalar>(p: &AffinePiece<S>, clique: &[usize], dim: usize) -> AffinePiece<S> {
    let mut grad = vec![S::zero(); dim];
    for (i, &v) in clique.iter().enumerate() {
        grad[v - 1] = p.grad[i].clone();
    }
    AffinePiece { grad, offset: p.offset.clone() }
}

fn affine_rank<S: Scalar>(points: &[Vec<S>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let rows: Vec<Vec<S>> = points[1..].iter().map(|p| vec_sub(p, &points[0])).collect();
    linalg::rank_of_rows(&rows)
}

/// Barycentric coordinates of `x` in a full-dimensional simplex; `None` when
/// the solve fails.
pub fn barycentric<S: Scalar>(simplex: &[Vec<S>], x: &[S]) -> Option<Vec<S>> {
    let k = simplex.len() - 1;
    if k == 0 {
        return Some(vec![S::one()]);
    }
    let cols: Vec<Vec<S>> = (1..=k).map(|i| vec_sub(&simplex[i], &simplex[0])).collect();
    let a = Mat::from_rows(cols).transpose();
    let rhs = vec_sub(x, &simplex[0]);
    let lam = linalg::solve(&a, &rhs)?;
    let sum = lam.iter().fold(S::zero(), |s, v| s + v.clone());
    let mut out = vec![S::one() - sum];
    out.extend(lam);
    Some(out)
}

/// Triangulated subdivision cell with the site index of each triangulation
/// vertex.
struct CellTriangulation<S> {
    simplices: Vec<(Vec<Vec<S>>, Vec<usize>)>,
}

fn triangulate_cell<S: Scalar>(
    cell: &crate::tent::TentCell<S>,
    tent: &TentFunction<S>,
) -> CellTriangulation<S> {
    let tri = cell.polytope.triangulate();
    let mut simplices = Vec::with_capacity(tri.len());
    for simplex in tri {
        let site_ids: Vec<usize> = simplex
            .iter()
            .map(|v| {
                // Match the vertex back to a site on this cell's facet; among
                // duplicates take the highest pole, then the smallest index.
                let mut best: Option<usize> = None;
                for &i in &cell.sites {
                    if tent.sites()[i].iter().zip(v).all(|(a, b)| a.approx_eq(b)) {
                        best = match best {
                            None => Some(i),
                            Some(j) if tent.heights()[i] > tent.heights()[j] => Some(i),
                            other => other,
                        };
                    }
                }
                best.expect("triangulation vertex is a site of the cell")
            })
            .collect();
        simplices.push((simplex, site_ids));
    }
    CellTriangulation { simplices }
}

/// Builds the refinement of the clique subdivisions over the support.
///
/// Cell tuples are enumerated with pruning: a branch is abandoned as soon as
/// the partial intersection stops being full-dimensional.
pub fn refine_subdivisions<S: Scalar>(
    cliques: &[Vec<usize>],
    tents: &[TentFunction<S>],
    support: &Polytope<S>,
) -> Result<RefinedComplex<S>> {
    let dim = support.dim();
    if !support.is_full_dimensional() {
        return Err(Error::LowerDimensionalSupport);
    }
    assert_eq!(cliques.len(), tents.len(), "one tent per clique");
    let subdivisions: Vec<Subdivision<S>> =
        tents.iter().map(|t| t.regular_subdivision()).collect::<Result<_>>()?;
    // Pre-lift every subdivision cell's inequalities once.
    let lifted: Vec<Vec<Vec<Halfspace<S>>>> = subdivisions
        .iter()
        .zip(cliques)
        .map(|(sub, c)| {
            sub.cells
                .iter()
                .map(|cell| {
                    let mut hs: Vec<Halfspace<S>> = cell
                        .polytope
                        .inequalities()
                        .iter()
                        .map(|h| lift_halfspace(h, c, dim))
                        .collect();
                    for e in cell.polytope.equations() {
                        let le = lift_halfspace(e, c, dim);
                        hs.push(Halfspace { a: le.a.iter().map(|v| -v.clone()).collect(), b: -le.b.clone() });
                        hs.push(le);
                    }
                    hs
                })
                .collect()
        })
        .collect();
    let cell_bboxes: Vec<Vec<Vec<(S, S)>>> = subdivisions
        .iter()
        .map(|sub| sub.cells.iter().map(|c| c.polytope.bounding_box()).collect())
        .collect();
    // Root state: the support polytope as a cut-state.
    let mut root = CutState::from_box(&support.bounding_box());
    for h in support.inequalities() {
        root.cut(h.clone());
    }
    let mut tuples: Vec<(Vec<usize>, Vec<Vec<S>>)> = Vec::new();
    // Depth-first over cliques.
    fn descend<S: Scalar>(
        level: usize,
        state: &CutState<S>,
        choice: &mut Vec<usize>,
        cliques: &[Vec<usize>],
        lifted: &[Vec<Vec<Halfspace<S>>>],
        bboxes: &[Vec<Vec<(S, S)>>],
        dim: usize,
        out: &mut Vec<(Vec<usize>, Vec<Vec<S>>)>,
    ) {
        if level == cliques.len() {
            out.push((choice.clone(), state.points.clone()));
            return;
        }
        // Bounding box of the current partial intersection on this clique's
        // coordinates, for cheap pruning.
        let cl = &cliques[level];
        let proj_box: Vec<(S, S)> = cl
            .iter()
            .map(|&v| {
                let mut lo = state.points[0][v - 1].clone();
                let mut hi = lo.clone();
                for p in &state.points[1..] {
                    if p[v - 1] < lo {
                        lo = p[v - 1].clone();
                    }
                    if p[v - 1] > hi {
                        hi = p[v - 1].clone();
                    }
                }
                (lo, hi)
            })
            .collect();
        'cells: for (ci, hs) in lifted[level].iter().enumerate() {
            for (pb, cb) in proj_box.iter().zip(&bboxes[level][ci]) {
                if pb.1.clone() + S::tol() < cb.0 || cb.1.clone() + S::tol() < pb.0 {
                    continue 'cells;
                }
            }
            let mut st = CutState {
                dim: state.dim,
                points: state.points.clone(),
                tight: state.tight.clone(),
                constraints: state.constraints.clone(),
            };
            for h in hs {
                st.cut(h.clone());
                if st.is_empty() {
                    continue 'cells;
                }
            }
            if affine_rank(&st.points) < dim {
                continue 'cells;
            }
            choice.push(ci);
            descend(level + 1, &st, choice, cliques, lifted, bboxes, dim, out);
            choice.pop();
        }
    }
    let mut choice = Vec::new();
    descend(0, &root, &mut choice, cliques, &lifted, &cell_bboxes, dim, &mut tuples);

    // Finalize cells: canonical polytopes, total affine piece, triangulation,
    // and per-vertex clique linkage.
    let mut tri_cache: HashMap<(usize, usize), CellTriangulation<S>> = HashMap::new();
    let mut cells = Vec::new();
    let mut simplices = Vec::new();
    for (choice, points) in tuples {
        let polytope = Polytope::from_points(dim, points);
        if polytope.affine_dim() < dim {
            continue;
        }
        let mut grad = vec![S::zero(); dim];
        let mut offset = S::zero();
        for (li, &ci) in choice.iter().enumerate() {
            let p = lift_piece(&subdivisions[li].cells[ci].piece, &cliques[li], dim);
            for (gj, pj) in grad.iter_mut().zip(&p.grad) {
                *gj = gj.clone() + pj.clone();
            }
            offset = offset + p.offset;
        }
        let piece = AffinePiece { grad, offset };
        let cell_idx = cells.len();
        for simplex in polytope.triangulate() {
            let links: Vec<VertexLink<S>> = simplex
                .iter()
                .map(|z| {
                    let value = piece.eval(z);
                    let clique_weights = (0..cliques.len())
                        .map(|li| {
                            let ci = choice[li];
                            let tri = tri_cache.entry((li, ci)).or_insert_with(|| {
                                triangulate_cell(&subdivisions[li].cells[ci], &tents[li])
                            });
                            let zc = project(z, &cliques[li]);
                            locate_weights(tri, &zc)
                        })
                        .collect();
                    VertexLink { value, clique_weights }
                })
                .collect();
            simplices.push(RefinedSimplex { vertices: simplex, links, cell: cell_idx });
        }
        cells.push(RefinedCell { polytope, choice, piece });
    }
    // Vertex pool: deduplicated tent pole locations.
    let mut vertex_pool: Vec<Vec<S>> = Vec::new();
    for s in &simplices {
        'verts: for v in &s.vertices {
            for q in &vertex_pool {
                if v.iter().zip(q).all(|(a, b)| a.approx_eq(b)) {
                    continue 'verts;
                }
            }
            vertex_pool.push(v.clone());
        }
    }
    vertex_pool.sort_by(|a, b| crate::geometry::lex_cmp(a, b));
    Ok(RefinedComplex {
        dim,
        cliques: cliques.to_vec(),
        support: support.clone(),
        subdivisions,
        cells,
        simplices,
        vertex_pool,
    })
}

/// Barycentric weights of `zc` in the triangulated cell: the containing
/// sub-simplex (best match when on shared boundaries) with clamped,
/// renormalized weights attached to sample indices.
fn locate_weights<S: Scalar>(tri: &CellTriangulation<S>, zc: &[S]) -> Vec<(usize, S)> {
    let mut best: Option<(S, Vec<S>, &Vec<usize>)> = None;
    for (simplex, ids) in &tri.simplices {
        let Some(lam) = barycentric(simplex, zc) else { continue };
        let min = lam.iter().cloned().fold(None::<S>, |acc, v| match acc {
            None => Some(v),
            Some(a) if v < a => Some(v),
            a => a,
        });
        let min = min.unwrap();
        let better = match &best {
            None => true,
            Some((m, _, _)) => min > *m,
        };
        if better {
            best = Some((min, lam, ids));
        }
    }
    let (min, lam, ids) = best.expect("projected vertex lies in its subdivision cell");
    debug_assert!(
        min.to_f64() > -1e-6,
        "barycentric location failed: min coordinate {}",
        min.to_f64()
    );
    // Clamp tiny negatives and renormalize.
    let clamped: Vec<S> =
        lam.into_iter().map(|v| if v.is_negative() { S::zero() } else { v }).collect();
    let total = clamped.iter().fold(S::zero(), |a, v| a + v.clone());
    ids.iter()
        .copied()
        .zip(clamped.into_iter().map(|v| v / total.clone()))
        .collect()
}

impl<S: Scalar> RefinedComplex<S> {
    /// Index of a refined cell containing `x`.
    pub fn locate(&self, x: &[S]) -> Option<usize> {
        (0..self.cells.len()).find(|&i| self.cells[i].polytope.contains(x))
    }

    /// Value of the total tent at `x` via the containing cell.
    pub fn value_at(&self, x: &[S]) -> Option<S> {
        self.locate(x).map(|i| self.cells[i].piece.eval(x))
    }

    /// Codimension of the minimal refinement face containing `z`, and per
    /// clique the codimension of the minimal subdivision face containing the
    /// projection of `z`. The proven bound `k_z ≤ Σ_C k_{z,C}` is asserted.
    pub fn codim_report(&self, z: &[S]) -> Result<(usize, Vec<usize>)> {
        let Some(ci) = self.locate(z) else {
            return Err(Error::PointOutsideSupport);
        };
        let k_z = self.cells[ci].polytope.tight_rank_at(z);
        let mut per_clique = Vec::with_capacity(self.cliques.len());
        for (li, c) in self.cliques.iter().enumerate() {
            let zc = project(z, c);
            let sub = &self.subdivisions[li];
            let Some(cell) = sub.locate(&zc) else {
                return Err(Error::PointOutsideSupport);
            };
            per_clique.push(sub.cells[cell].polytope.tight_rank_at(&zc));
        }
        let total: usize = per_clique.iter().sum();
        assert!(k_z <= total, "face codimension bound violated: {} > {:?}", k_z, per_clique);
        Ok((k_z, per_clique))
    }

    /// Checks the two codimension bounds at every refinement vertex: the
    /// subadditivity bound and the tent-pole bound `Σ_C k_{z,C} ≥ d`.
    pub fn verify_codim_bounds(&self) -> Result<()> {
        for v in &self.vertex_pool {
            let (k_z, per_clique) = self.codim_report(v)?;
            let total: usize = per_clique.iter().sum();
            if k_z > total {
                return Err(Error::InvalidInput(format!(
                    "codimension bound failed at {:?}: k_z={} > sum={}",
                    v.iter().map(|x| x.to_f64()).collect::<Vec<_>>(),
                    k_z,
                    total
                )));
            }
            if total < self.dim {
                return Err(Error::InvalidInput(format!(
                    "tent pole bound failed at {:?}: sum={} < d={}",
                    v.iter().map(|x| x.to_f64()).collect::<Vec<_>>(),
                    total,
                    self.dim
                )));
            }
        }
        Ok(())
    }

    /// Sum of the refined cell volumes; tiles of the support must add up to
    /// its volume.
    pub fn total_cell_volume(&self) -> S {
        self.cells.iter().fold(S::zero(), |a, c| a + c.polytope.volume())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use crate::tent::build_tent;

    fn r(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    fn half() -> Rat {
        Rat::new(1.into(), 2.into())
    }

    /// Unit cube support, path graph 1-2-3: subdivisions with a crease at the
    /// middle of the first (respectively last) coordinate.
    fn cube_config() -> (Vec<Vec<usize>>, Vec<TentFunction<Rat>>, Polytope<Rat>) {
        let cliques = vec![vec![1, 2], vec![2, 3]];
        // Tent on (x1,x2): crease along x1 = 1/2.
        let t12 = build_tent(
            vec![
                vec![r(0), r(0)],
                vec![r(0), r(1)],
                vec![half(), r(0)],
                vec![half(), r(1)],
                vec![r(1), r(0)],
                vec![r(1), r(1)],
            ],
            vec![r(0), r(0), r(1), r(1), r(0), r(0)],
        )
        .unwrap();
        // Tent on (x2,x3): crease along x3 = 1/2.
        let t23 = build_tent(
            vec![
                vec![r(0), r(0)],
                vec![r(1), r(0)],
                vec![r(0), half()],
                vec![r(1), half()],
                vec![r(0), r(1)],
                vec![r(1), r(1)],
            ],
            vec![r(0), r(0), r(1), r(1), r(0), r(0)],
        )
        .unwrap();
        let cube = Polytope::from_points(
            3,
            (0..8).map(|i| vec![r(i & 1), r((i >> 1) & 1), r((i >> 2) & 1)]).collect(),
        );
        (cliques, vec![t12, t23], cube)
    }

    #[test]
    fn cube_refinement_has_four_cells() {
        let (cliques, tents, cube) = cube_config();
        let rc = refine_subdivisions(&cliques, &tents, &cube).unwrap();
        assert_eq!(rc.cells.len(), 4);
        assert_eq!(rc.total_cell_volume(), r(1));
        // Codimensions at the distinguished boundary point.
        let z = vec![half(), r(0), half()];
        let (k_z, per_clique) = rc.codim_report(&z).unwrap();
        assert_eq!(k_z, 3);
        assert_eq!(per_clique, vec![2, 2]);
        // Interior of a maximal cell: all codimensions vanish.
        let z = vec![Rat::new(1.into(), 4.into()), half(), Rat::new(1.into(), 4.into())];
        let (k_z, per_clique) = rc.codim_report(&z).unwrap();
        assert_eq!(k_z, 0);
        assert_eq!(per_clique, vec![0, 0]);
        rc.verify_codim_bounds().unwrap();
    }

    #[test]
    fn single_clique_refinement_is_identity() {
        let sites: Vec<Vec<Rat>> =
            vec![vec![r(0), r(0)], vec![r(2), r(0)], vec![r(0), r(2)], vec![r(1), r(1)]];
        let tent =
            build_tent(sites.clone(), vec![r(0), r(0), r(0), r(1)]).unwrap();
        let support = Polytope::from_points(2, sites);
        let rc = refine_subdivisions(&[vec![1, 2]], &[tent.clone()], &support).unwrap();
        assert_eq!(rc.cells.len(), tent.cells().len());
        assert_eq!(rc.total_cell_volume(), support.volume());
        rc.verify_codim_bounds().unwrap();
    }

    #[test]
    fn all_single_cell_tents_give_one_cell() {
        let (cliques, _, cube) = cube_config();
        let flat12 = build_tent(
            vec![vec![r(0), r(0)], vec![r(1), r(0)], vec![r(0), r(1)], vec![r(1), r(1)]],
            vec![r(0); 4],
        )
        .unwrap();
        let flat23 = flat12.clone();
        let rc = refine_subdivisions(&cliques, &[flat12, flat23], &cube).unwrap();
        assert_eq!(rc.cells.len(), 1);
        assert!(rc.cells[0].polytope.equal(&cube));
    }

    #[test]
    fn values_match_tent_sums() {
        let (cliques, tents, cube) = cube_config();
        let rc = refine_subdivisions(&cliques, &tents, &cube).unwrap();
        let mut state = 5u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Rat::new(((state >> 40) as i64 % 16).into(), 16.into())
        };
        for _ in 0..200 {
            let x = vec![rnd(), rnd(), rnd()];
            let direct = tents[0].eval(&[x[0].clone(), x[1].clone()]).unwrap()
                + tents[1].eval(&[x[1].clone(), x[2].clone()]).unwrap();
            let via = rc.value_at(&x).unwrap();
            assert_eq!(direct, via);
        }
    }
}
