//! Longest-edge bisection with recursive conformity closure.
//!
//! A marked triangle is split through the midpoint of its longest edge. If the
//! neighbour across that edge has a different longest edge, the neighbour is
//! refined first (recursively, along the longest-edge propagation path) until
//! the shared edge is the longest edge of both, and then both are split
//! together. Every intermediate mesh is conforming.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{dist2, edge_order, Mesh, MeshError, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOptions {
    /// Minimum-angle floor (degrees) asserted on the refined mesh.
    pub min_angle_deg: f64,
    /// Closure depth cap is `depth_cap_factor * |marked|`.
    pub depth_cap_factor: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { min_angle_deg: 5.0, depth_cap_factor: 100 }
    }
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub mesh: Mesh,
    /// For each element of the new mesh, the element of the old mesh it came from.
    pub parent: Vec<usize>,
}

const NONE: usize = usize::MAX;

struct Work {
    verts: Vec<Point>,
    tris: Vec<[usize; 3]>,
    alive: Vec<bool>,
    origin: Vec<usize>,
    edge_tris: HashMap<[usize; 2], [usize; 2]>,
}

fn key(a: usize, b: usize) -> [usize; 2] {
    [a.min(b), a.max(b)]
}

impl Work {
    fn new(mesh: &Mesh) -> Self {
        let mut edge_tris = HashMap::with_capacity(mesh.num_edges());
        for (e, &k) in mesh.edges().iter().enumerate() {
            let (a, b) = mesh.edge_triangles(e);
            edge_tris.insert(k, [a, b.unwrap_or(NONE)]);
        }
        Work {
            verts: mesh.vertices().to_vec(),
            tris: mesh.triangles().to_vec(),
            alive: vec![true; mesh.num_triangles()],
            origin: (0..mesh.num_triangles()).collect(),
            edge_tris,
        }
    }

    fn longest(&self, t: usize) -> [usize; 2] {
        let tri = self.tris[t];
        let edge = |i: usize| key(tri[(i + 1) % 3], tri[(i + 2) % 3]);
        let len2 = |k: [usize; 2]| dist2(&self.verts[k[0]], &self.verts[k[1]]);
        let mut best = edge(0);
        for i in 1..3 {
            let cand = edge(i);
            if edge_order(len2(cand), cand, len2(best), best) == Ordering::Greater {
                best = cand;
            }
        }
        best
    }

    fn neighbor(&self, t: usize, e: [usize; 2]) -> Option<usize> {
        let [a, b] = self.edge_tris[&e];
        let n = if a == t { b } else { a };
        (n != NONE).then_some(n)
    }

    fn replace(&mut self, e: [usize; 2], old: usize, new: usize) {
        let slot = self.edge_tris.get_mut(&e).expect("edge present");
        if slot[0] == old {
            slot[0] = new;
        } else {
            debug_assert_eq!(slot[1], old);
            slot[1] = new;
        }
    }

    fn add(&mut self, e: [usize; 2], t: usize) {
        let slot = self.edge_tris.entry(e).or_insert([NONE, NONE]);
        if slot[0] == NONE {
            slot[0] = t;
        } else {
            slot[1] = t;
        }
    }

    /// Splits `t` through the midpoint `m` of its edge `e`.
    fn split_one(&mut self, t: usize, e: [usize; 2], m: usize) {
        let tri = self.tris[t];
        // rotate so that (a, b) is the split edge in counterclockwise order
        let i = (0..3).find(|&i| key(tri[i], tri[(i + 1) % 3]) == e).expect("edge of triangle");
        let (a, b, c) = (tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]);
        self.alive[t] = false;
        let c1 = self.tris.len();
        let c2 = c1 + 1;
        self.tris.push([a, m, c]);
        self.tris.push([m, b, c]);
        self.alive.extend([true, true]);
        let o = self.origin[t];
        self.origin.extend([o, o]);
        self.replace(key(c, a), t, c1);
        self.replace(key(b, c), t, c2);
        self.add(key(a, m), c1);
        self.add(key(m, b), c2);
        self.add(key(m, c), c1);
        self.add(key(m, c), c2);
    }

    fn split_edge(&mut self, e: [usize; 2]) {
        let [t1, t2] = self.edge_tris.remove(&e).expect("edge present");
        let (pa, pb) = (self.verts[e[0]], self.verts[e[1]]);
        let m = self.verts.len();
        self.verts.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        self.split_one(t1, e, m);
        if t2 != NONE {
            self.split_one(t2, e, m);
        }
    }

    fn refine(&mut self, start: usize, cap: usize) -> Result<(), MeshError> {
        let mut stack = vec![start];
        while let Some(&t) = stack.last() {
            if !self.alive[t] {
                stack.pop();
                continue;
            }
            let e = self.longest(t);
            match self.neighbor(t, e) {
                Some(n) if self.longest(n) != e => {
                    if stack.len() >= cap {
                        return Err(MeshError::ClosureDepth { cap });
                    }
                    stack.push(n);
                }
                _ => {
                    self.split_edge(e);
                    stack.pop();
                }
            }
        }
        Ok(())
    }
}

impl Mesh {
    /// Bisects every marked element through its refinement edge, with closure.
    pub fn bisect(&self, marked: &[usize], opts: &RefineOptions) -> Result<Refinement, MeshError> {
        for &k in marked {
            if k >= self.num_triangles() {
                return Err(MeshError::MarkedOutOfRange { element: k, count: self.num_triangles() });
            }
        }
        let mut order = marked.to_vec();
        order.sort_unstable();
        order.dedup();
        let cap = opts.depth_cap_factor.saturating_mul(order.len()).max(1);

        let mut work = Work::new(self);
        for &k in &order {
            // a marked element already split by an earlier closure has been
            // bisected through its own longest edge
            work.refine(k, cap)?;
        }

        let mut triangles = Vec::new();
        let mut parent = Vec::new();
        for (t, tri) in work.tris.iter().enumerate() {
            if work.alive[t] {
                triangles.push(*tri);
                parent.push(work.origin[t]);
            }
        }
        let mesh = Mesh::new(work.verts, triangles)?;
        for k in 0..mesh.num_triangles() {
            let angle = mesh.min_angle_deg(k);
            if angle < opts.min_angle_deg {
                return Err(MeshError::ShapeRegularity { element: k, angle_deg: angle, floor_deg: opts.min_angle_deg });
            }
        }
        Ok(Refinement { mesh, parent })
    }

    /// Bisects every element once.
    pub fn bisect_all(&self, opts: &RefineOptions) -> Result<Refinement, MeshError> {
        let all: Vec<usize> = (0..self.num_triangles()).collect();
        self.bisect(&all, opts)
    }
}
