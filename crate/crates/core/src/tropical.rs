//! Combinatorial tropical curves and their multiplicities.
//!
//! A [`TropTree`] is a rooted tree: the root is the sink vertex `V_∞`, every
//! other vertex has exactly one outgoing edge pointing towards it. Leaves are
//! unbounded edges: exterior markings (rays parallel to a divisor ray, with
//! weight `e_j(d)`) and interior markings (which carry the generator
//! `e*_1 ∧ … ∧ e*_n`). No positions in `N_ℝ` are stored.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{is_primitive, IntVector};
use crate::multivector::{a_product, ell, top_index, AMonomial};
use crate::toric::{CurveClass, NefToricProduct};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edge {
    /// Exterior marking on `vertex`, parallel to `direction` with `weight`.
    Ray {
        vertex: usize,
        divisor: usize,
        weight: u64,
        direction: IntVector,
    },
    /// Interior (point) marking on `vertex`.
    Marking { vertex: usize, name: String },
    Compact { ends: [usize; 2] },
}

impl Edge {
    fn touches(&self, v: usize) -> bool {
        match self {
            Edge::Ray { vertex, .. } | Edge::Marking { vertex, .. } => *vertex == v,
            Edge::Compact { ends } => ends.contains(&v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TropTree {
    rank: usize,
    num_vertices: usize,
    sink: usize,
    edges: Vec<Edge>,
}

/// Result of running the sink-flow recursion on a tree.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// `ζ_E` for every edge, indexed like [`TropTree::edges`].
    pub edge_labels: Vec<AMonomial>,
    /// `ζ_Γ`, the product of the labels at the sink.
    pub zeta: AMonomial,
    pub multiplicity: BigInt,
}

impl TropTree {
    /// An empty tree for the lattice `N ≅ ℤ^rank`; vertex 0 is the default sink.
    pub fn new(rank: usize) -> Self {
        TropTree {
            rank,
            num_vertices: 0,
            sink: 0,
            edges: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    pub fn set_sink(&mut self, v: usize) {
        self.sink = v;
    }

    pub fn add_ray(&mut self, vertex: usize, divisor: usize, weight: u64, direction: IntVector) -> usize {
        self.edges.push(Edge::Ray {
            vertex,
            divisor,
            weight,
            direction,
        });
        self.edges.len() - 1
    }

    pub fn add_marking(&mut self, vertex: usize, name: impl Into<String>) -> usize {
        self.edges.push(Edge::Marking {
            vertex,
            name: name.into(),
        });
        self.edges.len() - 1
    }

    pub fn add_compact(&mut self, a: usize, b: usize) -> usize {
        self.edges.push(Edge::Compact { ends: [a, b] });
        self.edges.len() - 1
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids incident to `v`, in insertion order.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].touches(v)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTree(m));
        if self.num_vertices == 0 {
            return bad("no vertices".into());
        }
        if self.sink >= self.num_vertices {
            return bad(format!("sink {} is not a vertex", self.sink));
        }
        let mut compact = 0;
        for (id, e) in self.edges.iter().enumerate() {
            match e {
                Edge::Ray {
                    vertex,
                    weight,
                    direction,
                    ..
                } => {
                    if *vertex >= self.num_vertices {
                        return bad(format!("edge {id} attached to missing vertex {vertex}"));
                    }
                    if *weight == 0 {
                        return bad(format!("ray edge {id} has weight 0"));
                    }
                    if direction.len() != self.rank {
                        return Err(Error::RankMismatch {
                            left: direction.len(),
                            right: self.rank,
                        });
                    }
                    if !is_primitive(direction).unwrap_or(false) {
                        return bad(format!("ray edge {id} direction {direction} is not primitive"));
                    }
                }
                Edge::Marking { vertex, .. } => {
                    if *vertex >= self.num_vertices {
                        return bad(format!("edge {id} attached to missing vertex {vertex}"));
                    }
                }
                Edge::Compact { ends: [a, b] } => {
                    if *a >= self.num_vertices || *b >= self.num_vertices || a == b {
                        return bad(format!("compact edge {id} has bad ends {a}, {b}"));
                    }
                    compact += 1;
                }
            }
        }
        if compact + 1 != self.num_vertices {
            return bad(format!(
                "{} vertices need {} compact edges for a tree, found {compact}",
                self.num_vertices,
                self.num_vertices - 1
            ));
        }
        let (_, order) = self.flow();
        if order.len() != self.num_vertices {
            return bad("graph is disconnected".into());
        }
        for v in 0..self.num_vertices {
            let inc = self.incident(v);
            let marked = inc
                .iter()
                .any(|&e| matches!(self.edges[e], Edge::Marking { .. }));
            if inc.len() <= 2 && !marked {
                return bad(format!("vertex {v} has valency {} and no marking", inc.len()));
            }
        }
        Ok(())
    }

    /// BFS from the sink: outgoing edge of every vertex and vertices in BFS order.
    fn flow(&self) -> (Vec<Option<usize>>, Vec<usize>) {
        let mut out_edge = vec![None; self.num_vertices];
        let mut seen = vec![false; self.num_vertices];
        let mut order = Vec::with_capacity(self.num_vertices);
        let mut queue = VecDeque::from([self.sink]);
        seen[self.sink] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for e in self.incident(v) {
                if let Edge::Compact { ends: [a, b] } = self.edges[e] {
                    let w = if a == v { b } else { a };
                    if !seen[w] {
                        seen[w] = true;
                        out_edge[w] = Some(e);
                        queue.push_back(w);
                    }
                }
            }
        }
        (out_edge, order)
    }

    fn leaf_label(&self, e: usize) -> Option<AMonomial> {
        match &self.edges[e] {
            Edge::Ray {
                weight, direction, ..
            } => Some(AMonomial::pure(direction.scaled(&BigInt::from(*weight)))),
            Edge::Marking { .. } => Some(AMonomial::top_generator(self.rank)),
            Edge::Compact { .. } => None,
        }
    }

    /// Runs the recursion `ζ_out = ℓ_k(ζ_in…)` towards the sink and takes the
    /// index of the product at the sink.
    pub fn evaluate(&self) -> Result<Evaluation> {
        self.validate()?;
        let (out_edge, order) = self.flow();
        let mut labels: Vec<Option<AMonomial>> = (0..self.edges.len()).map(|e| self.leaf_label(e)).collect();

        for &v in order.iter().rev() {
            let incoming: Vec<AMonomial> = self
                .incident(v)
                .into_iter()
                .filter(|&e| Some(e) != out_edge[v])
                .map(|e| labels[e].clone().expect("upstream edges are labelled first"))
                .collect();
            match out_edge[v] {
                Some(out) => {
                    if incoming.is_empty() {
                        return Err(Error::EmptyVertex { vertex: v });
                    }
                    labels[out] = Some(ell(&incoming)?);
                }
                None => {
                    if incoming.is_empty() {
                        return Err(Error::EmptyVertex { vertex: v });
                    }
                    let zeta = a_product(&incoming)?;
                    let multiplicity = top_index(&zeta).map_err(|e| match e {
                        Error::Structural(m) => Error::Structural(format!("at sink vertex {v}: {m}")),
                        other => other,
                    })?;
                    return Ok(Evaluation {
                        edge_labels: labels.into_iter().map(|l| l.expect("all edges labelled")).collect(),
                        zeta,
                        multiplicity,
                    });
                }
            }
        }
        unreachable!("the sink is the first vertex of the flow order")
    }

    /// JSON dump of the tree with per-edge `ζ` exponent and grade.
    pub fn dump(&self) -> Result<Value> {
        let eval = self.evaluate()?;
        let vertices: Vec<Value> = (0..self.num_vertices)
            .map(|v| json!({ "id": v, "sink": v == self.sink, "edges": self.incident(v) }))
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .zip(&eval.edge_labels)
            .enumerate()
            .map(|(id, (e, z))| {
                let kind = match e {
                    Edge::Ray {
                        vertex,
                        divisor,
                        weight,
                        ..
                    } => json!({ "ray": { "vertex": vertex, "divisor": divisor + 1, "weight": weight } }),
                    Edge::Marking { vertex, name } => json!({ "marking": { "vertex": vertex, "name": name } }),
                    Edge::Compact { ends } => json!({ "compact": ends }),
                };
                json!({
                    "id": id,
                    "kind": kind,
                    "exponent": z.exponent.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "grade": z.alpha.grade(),
                    "alpha": z.alpha.to_string(),
                })
            })
            .collect();
        Ok(json!({
            "vertices": vertices,
            "edges": edges,
            "multiplicity": eval.multiplicity.to_string(),
        }))
    }
}

pub fn multiplicity(t: &TropTree) -> Result<BigInt> {
    Ok(t.evaluate()?.multiplicity)
}

fn positive_tangencies(x: &NefToricProduct, d: &CurveClass) -> Result<Vec<u64>> {
    let e = x.tangencies(d)?;
    if let Some(j) = e.iter().position(|&ej| ej == 0) {
        return Err(Error::ZeroTangency {
            degree: d.0.clone(),
            divisor: j + 1,
        });
    }
    Ok(e)
}

/// The star: one vertex carrying every ray and the point marking.
pub fn build_p_curve(x: &NefToricProduct, d: &CurveClass) -> Result<TropTree> {
    let e = positive_tangencies(x, d)?;
    let mut t = TropTree::new(x.dim());
    let v = t.add_vertex();
    t.set_sink(v);
    for (j, &ej) in e.iter().enumerate() {
        t.add_ray(v, j, ej, x.ray(j).clone());
    }
    t.add_marking(v, "P");
    Ok(t)
}

/// The two-point caterpillar with rays attached in the global divisor order.
pub fn build_q_curve(x: &NefToricProduct, d: &CurveClass) -> Result<TropTree> {
    let order: Vec<usize> = (0..x.dim()).collect();
    build_q_curve_with_order(x, d, &order)
}

/// The two-point caterpillar: `P_1` and the first non-last ray meet at `V_1`,
/// each following chain vertex attaches one more non-last ray, and the sink
/// `P_2` receives the last compact edge, the `r_X` last rays and its marking.
///
/// `order` is a permutation of the non-last divisors `0..|n_X|`.
pub fn build_q_curve_with_order(x: &NefToricProduct, d: &CurveClass, order: &[usize]) -> Result<TropTree> {
    let e = positive_tangencies(x, d)?;
    let n = x.dim();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidTree(format!(
            "attachment order {order:?} is not a permutation of 0..{n}"
        )));
    }
    let mut t = TropTree::new(n);
    let mut prev = t.add_vertex();
    t.add_ray(prev, order[0], e[order[0]], x.ray(order[0]).clone());
    t.add_marking(prev, "P1");
    for &j in &order[1..] {
        let v = t.add_vertex();
        t.add_compact(prev, v);
        t.add_ray(v, j, e[j], x.ray(j).clone());
        prev = v;
    }
    let sink = t.add_vertex();
    t.set_sink(sink);
    t.add_compact(prev, sink);
    for (j, &ej) in e.iter().enumerate().skip(n) {
        t.add_ray(sink, j, ej, x.ray(j).clone());
    }
    t.add_marking(sink, "P2");
    Ok(t)
}

/// Closed-form log invariants `(Rp_d, Rq_d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogInvariantPair {
    pub rp: BigRational,
    pub rq: BigRational,
}

pub fn log_invariants(x: &NefToricProduct, d: &CurveClass) -> Result<LogInvariantPair> {
    let e = x.tangencies(d)?;
    if e.contains(&0) {
        return Ok(LogInvariantPair {
            rp: BigRational::zero(),
            rq: BigRational::zero(),
        });
    }
    Ok(LogInvariantPair {
        rp: BigRational::one(),
        rq: BigRational::from_integer(x.point_constant() * x.degree_power(d)),
    })
}

pub fn rp_log(x: &NefToricProduct, d: &CurveClass) -> Result<BigRational> {
    Ok(log_invariants(x, d)?.rp)
}

pub fn rq_log(x: &NefToricProduct, d: &CurveClass) -> Result<BigRational> {
    Ok(log_invariants(x, d)?.rq)
}
