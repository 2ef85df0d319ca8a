//! Discrete Bayesian networks: structure, CPTs, output nodes and the
//! attribute encoding that turns a record into a released bit vector.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::inference::SupportDistribution;

/// Tolerance on CPT row sums accepted by [`BayesianNetwork::new`].
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Default cap on the number of joint states enumerated when marginalizing.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 10_000_000;

/// One node of a network. CPT rows are ordered lexicographically over the
/// parent states, first parent most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub name: String,
    pub states: Vec<String>,
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

impl NodeSpec {
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        parents: Vec<String>,
        cpt: Vec<Vec<f64>>,
    ) -> Self {
        NodeSpec {
            name: name.into(),
            states,
            parents,
            cpt,
        }
    }

    /// A parentless node with a single distribution row.
    pub fn root(name: impl Into<String>, states: Vec<String>, probs: Vec<f64>) -> Self {
        NodeSpec::new(name, states, Vec::new(), vec![probs])
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// How an output node is turned into released attribute bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// One bit per binary node, equal to its state index.
    RawBinary,
    /// One indicator bit per state.
    OneHot,
}

impl Encoding {
    pub fn as_str(&self) -> &'static str {
        match self {
            Encoding::RawBinary => "raw-binary",
            Encoding::OneHot => "one-hot",
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "raw-binary" | "raw" | "binary" => Ok(Encoding::RawBinary),
            "one-hot" | "onehot" => Ok(Encoding::OneHot),
            other => Err(format!("unknown encoding `{other}`")),
        }
    }
}

/// A failed structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: Option<String>,
    pub reason: String,
}

impl Violation {
    fn at(node: &str, reason: impl Into<String>) -> Self {
        Violation {
            node: Some(node.to_string()),
            reason: reason.into(),
        }
    }

    fn global(reason: impl Into<String>) -> Self {
        Violation {
            node: None,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Some(n) => write!(f, "{n}: {}", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

/// Checks every structural invariant of a network description.
///
/// Returns one entry per failed invariant; an empty list means the parts can
/// be assembled with [`BayesianNetwork::new`].
pub fn validate(nodes: &[NodeSpec], outputs: &[String], encoding: Encoding) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, node) in nodes.iter().enumerate() {
        if index.insert(node.name.as_str(), i).is_some() {
            out.push(Violation::at(&node.name, "duplicate node name"));
        }
    }

    for node in nodes {
        let k = node.cardinality();
        if k < 2 {
            out.push(Violation::at(&node.name, format!("cardinality {k} < 2")));
        }
        let mut expected_rows = Some(1usize);
        for p in &node.parents {
            match index.get(p.as_str()) {
                Some(&pi) => {
                    expected_rows =
                        expected_rows.and_then(|r| r.checked_mul(nodes[pi].cardinality().max(1)));
                }
                None => {
                    out.push(Violation::at(&node.name, format!("unknown parent `{p}`")));
                    expected_rows = None;
                }
            }
        }
        if let Some(rows) = expected_rows {
            if node.cpt.len() != rows {
                out.push(Violation::at(
                    &node.name,
                    format!("CPT has {} rows, expected {rows}", node.cpt.len()),
                ));
            }
        }
        for (r, row) in node.cpt.iter().enumerate() {
            if row.len() != k {
                out.push(Violation::at(
                    &node.name,
                    format!("CPT row {r} has length {}, expected {k}", row.len()),
                ));
                continue;
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                out.push(Violation::at(
                    &node.name,
                    format!("CPT row {r} has an entry outside [0,1]"),
                ));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                out.push(Violation::at(
                    &node.name,
                    format!("row sum ≠ 1 (row {r} sums to {sum})"),
                ));
            }
        }
    }

    if topological_order(nodes).is_none() {
        let cyclic = cyclic_nodes(nodes);
        out.push(Violation::global(format!(
            "cycle through {}",
            cyclic.join(", ")
        )));
    }

    if outputs.is_empty() {
        out.push(Violation::global("no output nodes"));
    }
    let mut seen = Vec::new();
    for o in outputs {
        if seen.contains(&o) {
            out.push(Violation::at(o, "duplicate output node"));
        }
        seen.push(o);
        match index.get(o.as_str()) {
            None => out.push(Violation::at(o, "output node is not declared")),
            Some(&i) => {
                if encoding == Encoding::RawBinary && nodes[i].cardinality() != 2 {
                    out.push(Violation::at(
                        o,
                        "raw-binary encoding requires a binary node",
                    ));
                }
            }
        }
    }
    out
}

/// Stable Kahn ordering: among ready nodes the earliest declared goes first.
/// `None` when the graph has a cycle or a dangling parent.
fn topological_order(nodes: &[NodeSpec]) -> Option<Vec<usize>> {
    let index: HashMap<&str, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.name.as_str(), i))
        .collect();
    let mut indegree = vec![0usize; nodes.len()];
    let mut children = vec![Vec::new(); nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        for p in &n.parents {
            let pi = *index.get(p.as_str())?;
            indegree[i] += 1;
            children[pi].push(i);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..nodes.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == nodes.len()).then_some(order)
}

fn cyclic_nodes(nodes: &[NodeSpec]) -> Vec<String> {
    // Repeatedly strip nodes without resolvable in-cycle parents.
    let mut alive: Vec<bool> = vec![true; nodes.len()];
    let index: HashMap<&str, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.name.as_str(), i))
        .collect();
    loop {
        let mut changed = false;
        for (i, n) in nodes.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let blocked = n
                .parents
                .iter()
                .any(|p| index.get(p.as_str()).is_some_and(|&pi| alive[pi]));
            if !blocked {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    nodes
        .iter()
        .zip(&alive)
        .filter(|(_, a)| **a)
        .map(|(n, _)| n.name.clone())
        .collect()
}

/// A state assignment: one state index per node (a full record) or per
/// output node in output order (a projected record).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Record(pub Vec<usize>);

impl Record {
    pub fn states(&self) -> &[usize] {
        &self.0
    }
}

/// Released attribute bits of a single record.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodedVector(pub Vec<u8>);

impl EncodedVector {
    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// A private dataset of projected records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<Record>,
}

impl Dataset {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        let Some(first) = records.first() else {
            return Err(Error::contract("dataset must contain at least one record"));
        };
        let width = first.0.len();
        if records.iter().any(|r| r.0.len() != width) {
            return Err(Error::contract("dataset records cover different node sets"));
        }
        Ok(Dataset { records })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// The released statistic: integer column sums `c = n·x̄`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReleasedCounts {
    counts: Vec<u32>,
    n: u32,
}

impl ReleasedCounts {
    pub fn new(counts: Vec<u32>, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("released counts need n ≥ 1"));
        }
        if let Some(j) = counts.iter().position(|&c| c > n) {
            return Err(Error::contract(format!(
                "count c[{j}] = {} exceeds n = {n}",
                counts[j]
            )));
        }
        Ok(ReleasedCounts { counts, n })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Sample mean of attribute `j`.
    pub fn mean(&self, j: usize) -> f64 {
        f64::from(self.counts[j]) / f64::from(self.n)
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.mean(j)).collect()
    }
}

/// A validated discrete Bayesian network with designated output nodes.
///
/// Nodes are stored in topological order. The network is immutable once
/// built and can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    nodes: Vec<NodeSpec>,
    parents: Vec<Vec<usize>>,
    outputs: Vec<usize>,
    encoding: Encoding,
    offsets: Vec<usize>,
    dim: usize,
}

/// Rescales a row to sum to 1 unless it already does up to summation
/// rounding, so that decimal rows keep their literal values.
pub(crate) fn renormalize(row: &mut [f64]) {
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > row.len() as f64 * f64::EPSILON {
        row.iter_mut().for_each(|p| *p /= s);
    }
}

impl BayesianNetwork {
    /// Validates, topologically sorts and assembles a network. Rows that sum
    /// to 1 within [`ROW_SUM_TOLERANCE`] are renormalized exactly.
    pub fn new(nodes: Vec<NodeSpec>, outputs: &[String], encoding: Encoding) -> Result<Self> {
        let violations = validate(&nodes, outputs, encoding);
        if !violations.is_empty() {
            return Err(Error::InvalidNetwork(violations));
        }
        let order = topological_order(&nodes).expect("validated network is acyclic");
        let mut slots: Vec<Option<NodeSpec>> = nodes.into_iter().map(Some).collect();
        let mut sorted: Vec<NodeSpec> = order
            .iter()
            .map(|&i| slots[i].take().expect("each node once"))
            .collect();
        for node in &mut sorted {
            node.cpt.iter_mut().for_each(|row| renormalize(row));
        }
        let index: HashMap<&str, usize> = sorted
            .iter()
            .enumerate()
            .map(|(i, n)| (n.name.as_str(), i))
            .collect();
        let parents = sorted
            .iter()
            .map(|n| n.parents.iter().map(|p| index[p.as_str()]).collect())
            .collect();
        let outputs: Vec<usize> = outputs.iter().map(|o| index[o.as_str()]).collect();
        let (offsets, dim) = layout(&sorted, &outputs, encoding);
        Ok(BayesianNetwork {
            nodes: sorted,
            parents,
            outputs,
            encoding,
            offsets,
            dim,
        })
    }

    /// Same network with a different output set or encoding.
    pub fn with_outputs(&self, outputs: &[String], encoding: Encoding) -> Result<Self> {
        BayesianNetwork::new(self.nodes.clone(), outputs, encoding)
    }

    /// Same structure with every CPT replaced. `cpts[i]` belongs to node `i`
    /// in this network's order.
    pub fn with_cpts(&self, cpts: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if cpts.len() != self.nodes.len() {
            return Err(Error::contract("one CPT per node required"));
        }
        let nodes = self
            .nodes
            .iter()
            .zip(cpts)
            .map(|(n, cpt)| NodeSpec { cpt, ..n.clone() })
            .collect();
        BayesianNetwork::new(nodes, &self.output_names(), self.encoding)
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &NodeSpec {
        &self.nodes[i]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn parent_indices(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn output_names(&self) -> Vec<String> {
        self.outputs
            .iter()
            .map(|&i| self.nodes[i].name.clone())
            .collect()
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    /// Attribute dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bit offset of output `k` (position in [`Self::outputs`]).
    pub fn attribute_offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    /// Encoded width of a node under this network's encoding.
    fn width(&self, i: usize) -> usize {
        match self.encoding {
            Encoding::RawBinary => 1,
            Encoding::OneHot => self.nodes[i].cardinality(),
        }
    }

    /// Attribute count if every node were released.
    pub fn param_count(&self) -> usize {
        (0..self.nodes.len()).map(|i| self.width(i)).sum()
    }

    /// Attribute count of the released nodes, equal to [`Self::dim`].
    pub fn output_param_count(&self) -> usize {
        self.outputs.iter().map(|&i| self.width(i)).sum()
    }

    /// ∏ cardinalities, saturating.
    pub fn joint_state_count(&self) -> u128 {
        self.nodes
            .iter()
            .fold(1u128, |acc, n| acc.saturating_mul(n.cardinality() as u128))
    }

    /// Index of the CPT row selected by the parents' states in `full`.
    pub fn row_index(&self, node: usize, full: &[usize]) -> usize {
        self.parents[node]
            .iter()
            .fold(0, |acc, &p| acc * self.nodes[p].cardinality() + full[p])
    }

    fn check_full(&self, full: &Record) -> Result<()> {
        if full.0.len() != self.nodes.len() {
            return Err(Error::contract(format!(
                "full record assigns {} nodes, network has {}",
                full.0.len(),
                self.nodes.len()
            )));
        }
        for (node, &s) in self.nodes.iter().zip(&full.0) {
            if s >= node.cardinality() {
                return Err(Error::contract(format!(
                    "state {s} out of range for node {}",
                    node.name
                )));
            }
        }
        Ok(())
    }

    /// Chain-rule probability of a full record.
    pub fn joint_prob(&self, full: &Record) -> Result<f64> {
        self.check_full(full)?;
        Ok(self.joint_prob_unchecked(&full.0))
    }

    pub(crate) fn joint_prob_unchecked(&self, full: &[usize]) -> f64 {
        let mut p = 1.0;
        for (i, node) in self.nodes.iter().enumerate() {
            p *= node.cpt[self.row_index(i, full)][full[i]];
            if p == 0.0 {
                break;
            }
        }
        p
    }

    /// Calls `visit(full_state, probability)` for every joint state with
    /// nonzero probability, in lexicographic (topological-order) sequence.
    pub(crate) fn for_each_joint_state(&self, mut visit: impl FnMut(&[usize], f64)) {
        let mut state = vec![0usize; self.nodes.len()];
        self.enumerate_from(0, 1.0, &mut state, &mut visit);
    }

    fn enumerate_from(
        &self,
        i: usize,
        p: f64,
        state: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize], f64),
    ) {
        if i == self.nodes.len() {
            visit(state, p);
            return;
        }
        let row = &self.nodes[i].cpt[self.row_index(i, state)];
        for (s, &q) in row.iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            state[i] = s;
            self.enumerate_from(i + 1, p * q, state, visit);
        }
        state[i] = 0;
    }

    /// Exact law of the encoded output vector, with the default guard.
    pub fn output_marginal_law(&self) -> Result<SupportDistribution> {
        self.output_marginal_law_with_guard(DEFAULT_ENUMERATION_GUARD)
    }

    /// Exact law of the encoded output vector by exhaustive enumeration of
    /// the joint. Zero-probability outcomes are dropped.
    pub fn output_marginal_law_with_guard(&self, guard: u128) -> Result<SupportDistribution> {
        let states = self.joint_state_count();
        if states > guard {
            return Err(Error::TooLarge { states, guard });
        }
        let mut acc: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        let mut bits = vec![0u8; self.dim];
        self.for_each_joint_state(|full, p| {
            self.encode_into(full, &mut bits);
            *acc.entry(bits.clone()).or_insert(0.0) += p;
        });
        let outcomes = acc
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(b, p)| (EncodedVector(b), p))
            .collect();
        SupportDistribution::new(self.dim, outcomes)
    }

    /// Population marginals μ: probability that each attribute bit is set.
    pub fn attribute_marginals(&self) -> Result<Vec<f64>> {
        Ok(self.output_marginal_law()?.expectation())
    }

    /// Ancestral sampling in topological order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Record {
        let mut state = vec![0usize; self.nodes.len()];
        for i in 0..self.nodes.len() {
            let row = &self.nodes[i].cpt[self.row_index(i, &state)];
            state[i] = draw_categorical(row, rng);
        }
        Record(state)
    }

    /// Restricts a full record to the output nodes.
    pub fn project(&self, full: &Record) -> Record {
        Record(self.outputs.iter().map(|&i| full.0[i]).collect())
    }

    /// Encodes a projected record.
    pub fn encode(&self, projected: &Record) -> Result<EncodedVector> {
        if projected.0.len() != self.outputs.len() {
            return Err(Error::contract(format!(
                "projected record has {} values, expected {}",
                projected.0.len(),
                self.outputs.len()
            )));
        }
        let mut bits = vec![0u8; self.dim];
        for (k, (&node, &s)) in self.outputs.iter().zip(&projected.0).enumerate() {
            let card = self.nodes[node].cardinality();
            if s >= card {
                return Err(Error::contract(format!(
                    "state {s} out of range for node {}",
                    self.nodes[node].name
                )));
            }
            match self.encoding {
                Encoding::RawBinary => {
                    if card != 2 {
                        return Err(Error::contract("raw-binary encoding of a non-binary node"));
                    }
                    bits[self.offsets[k]] = s as u8;
                }
                Encoding::OneHot => bits[self.offsets[k] + s] = 1,
            }
        }
        Ok(EncodedVector(bits))
    }

    /// Encodes the output part of a full record.
    pub fn encode_full(&self, full: &Record) -> EncodedVector {
        let mut bits = vec![0u8; self.dim];
        self.encode_into(&full.0, &mut bits);
        EncodedVector(bits)
    }

    fn encode_into(&self, full: &[usize], bits: &mut [u8]) {
        bits.iter_mut().for_each(|b| *b = 0);
        for (k, &node) in self.outputs.iter().enumerate() {
            let s = full[node];
            match self.encoding {
                Encoding::RawBinary => bits[self.offsets[k]] = s as u8,
                Encoding::OneHot => bits[self.offsets[k] + s] = 1,
            }
        }
    }

    /// Inverse of [`Self::encode`].
    pub fn decode(&self, v: &EncodedVector) -> Result<Record> {
        if v.dim() != self.dim {
            return Err(Error::contract(format!(
                "encoded vector has length {}, expected {}",
                v.dim(),
                self.dim
            )));
        }
        let mut states = Vec::with_capacity(self.outputs.len());
        for (k, &node) in self.outputs.iter().enumerate() {
            let off = self.offsets[k];
            match self.encoding {
                Encoding::RawBinary => match v.0[off] {
                    b @ (0 | 1) => states.push(b as usize),
                    _ => return Err(Error::contract("bits must be 0 or 1")),
                },
                Encoding::OneHot => {
                    let card = self.nodes[node].cardinality();
                    let block = &v.0[off..off + card];
                    if block.iter().map(|&b| b as usize).sum::<usize>() != 1
                        || block.iter().any(|&b| b > 1)
                    {
                        return Err(Error::contract(format!(
                            "one-hot block of {} does not sum to 1",
                            self.nodes[node].name
                        )));
                    }
                    states.push(block.iter().position(|&b| b == 1).unwrap());
                }
            }
        }
        Ok(Record(states))
    }

    /// Released counts of a dataset of projected records.
    pub fn dataset_counts(&self, ds: &Dataset) -> Result<ReleasedCounts> {
        let mut counts = vec![0u32; self.dim];
        for r in ds.records() {
            let v = self.encode(r)?;
            for (c, b) in counts.iter_mut().zip(v.bits()) {
                *c += u32::from(*b);
            }
        }
        ReleasedCounts::new(counts, ds.len() as u32)
    }

    /// Checks that `counts` could come from this network's encoding.
    pub fn check_counts(&self, counts: &ReleasedCounts) -> Result<()> {
        if counts.dim() != self.dim {
            return Err(Error::contract(format!(
                "counts have dimension {}, network has d = {}",
                counts.dim(),
                self.dim
            )));
        }
        if self.encoding == Encoding::OneHot {
            for (k, &node) in self.outputs.iter().enumerate() {
                let off = self.offsets[k];
                let card = self.nodes[node].cardinality();
                let s: u32 = counts.counts()[off..off + card].iter().sum();
                if s != counts.n() {
                    return Err(Error::contract(format!(
                        "one-hot counts of {} sum to {s}, expected n = {}",
                        self.nodes[node].name,
                        counts.n()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Label of a state, used in CSV output.
    pub fn state_label(&self, node: usize, state: usize) -> &str {
        &self.nodes[node].states[state]
    }
}

fn layout(nodes: &[NodeSpec], outputs: &[usize], encoding: Encoding) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(outputs.len());
    let mut d = 0;
    for &o in outputs {
        offsets.push(d);
        d += match encoding {
            Encoding::RawBinary => 1,
            Encoding::OneHot => nodes[o].cardinality(),
        };
    }
    (offsets, d)
}

pub(crate) fn draw_categorical<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (s, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return s;
        }
    }
    // Rounding left a sliver above the last cumulative value.
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

pub(crate) fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coin(name: &str, p1: f64) -> NodeSpec {
        NodeSpec::root(name, labels(&["0", "1"]), vec![1.0 - p1, p1])
    }

    fn product(ps: &[f64]) -> BayesianNetwork {
        let nodes: Vec<_> = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| coin(&format!("X{}", i + 1), p))
            .collect();
        let outs: Vec<_> = nodes.iter().map(|n| n.name.clone()).collect();
        BayesianNetwork::new(nodes, &outs, Encoding::RawBinary).unwrap()
    }

    #[test]
    fn bad_row_sum_is_one_violation() {
        let node = NodeSpec::root("A", labels(&["f", "t"]), vec![0.5, 0.6]);
        let v = validate(&[node], &["A".into()], Encoding::RawBinary);
        assert_eq!(v.len(), 1);
        assert!(v[0].reason.contains("row sum ≠ 1"), "{}", v[0]);
    }

    #[test]
    fn two_cycle_is_reported() {
        let a = NodeSpec::new(
            "A",
            labels(&["0", "1"]),
            labels(&["B"]),
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        );
        let b = NodeSpec::new(
            "B",
            labels(&["0", "1"]),
            labels(&["A"]),
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        );
        let v = validate(&[a, b], &["A".into()], Encoding::RawBinary);
        assert_eq!(v.len(), 1);
        assert!(v[0].reason.starts_with("cycle"), "{}", v[0]);
    }

    #[test]
    fn raw_binary_rejects_ternary_output() {
        let n = NodeSpec::root("T", labels(&["a", "b", "c"]), vec![0.2, 0.3, 0.5]);
        let v = validate(&[n], &["T".into()], Encoding::RawBinary);
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn missing_rows_and_parents() {
        let a = coin("A", 0.5);
        let b = NodeSpec::new(
            "B",
            labels(&["0", "1"]),
            labels(&["A"]),
            vec![vec![0.5, 0.5]],
        );
        let c = NodeSpec::new(
            "C",
            labels(&["0", "1"]),
            labels(&["Z"]),
            vec![vec![0.5, 0.5]],
        );
        let v = validate(&[a, b, c], &["A".into()], Encoding::RawBinary);
        assert!(v.iter().any(|x| x.reason.contains("expected 2")));
        assert!(v.iter().any(|x| x.reason.contains("unknown parent")));
    }

    #[test]
    fn product_joint_is_independent() {
        let bn = product(&[0.5, 0.5]);
        assert_eq!(bn.joint_prob(&Record(vec![1, 1])).unwrap(), 0.25);
        let bn = product(&[0.3, 0.7]);
        assert!((bn.joint_prob(&Record(vec![1, 1])).unwrap() - 0.21).abs() < 1e-15);
    }

    #[test]
    fn joint_prob_rejects_partial_record() {
        let bn = product(&[0.5, 0.5]);
        assert!(matches!(
            bn.joint_prob(&Record(vec![1])),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn uniform_product_law() {
        let law = product(&[0.5, 0.5]).output_marginal_law().unwrap();
        assert_eq!(law.outcomes().len(), 4);
        assert!(law.outcomes().iter().all(|(_, p)| *p == 0.25));
    }

    #[test]
    fn guard_rejects_large_network() {
        let bn = product(&[0.5; 24]);
        let err = bn.output_marginal_law().unwrap_err();
        assert!(err
            .to_string()
            .contains("network too large for exhaustive marginalization"));
    }

    #[test]
    fn sampling_is_deterministic_and_calibrated() {
        let bn = product(&[0.3]);
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            assert_eq!(bn.sample(&mut a), bn.sample(&mut b));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| bn.sample(&mut rng).0[0] == 1)
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.3).abs() < 0.01, "{freq}");
    }

    #[test]
    fn encode_examples() {
        let bn = product(&[0.5, 0.5]);
        assert_eq!(bn.encode(&Record(vec![1, 0])).unwrap().0, vec![1, 0]);

        let n = NodeSpec::root("L", labels(&["low", "high"]), vec![0.5, 0.5]);
        let bn = BayesianNetwork::new(vec![n], &["L".into()], Encoding::OneHot).unwrap();
        assert_eq!(bn.encode(&Record(vec![1])).unwrap().0, vec![0, 1]);
        assert_eq!(
            bn.decode(&EncodedVector(vec![0, 1])).unwrap(),
            Record(vec![1])
        );
        assert!(bn.decode(&EncodedVector(vec![1, 1])).is_err());
    }

    #[test]
    fn hand_counts() {
        let bn = product(&[0.5, 0.5]);
        let ds = Dataset::new(vec![
            Record(vec![1, 0]),
            Record(vec![0, 1]),
            Record(vec![1, 1]),
        ])
        .unwrap();
        let c = bn.dataset_counts(&ds).unwrap();
        assert_eq!(c.counts(), &[2, 2]);
        assert_eq!(c.n(), 3);

        let r = Record(vec![1, 0]);
        let ds = Dataset::new(vec![r.clone(); 4]).unwrap();
        assert_eq!(bn.dataset_counts(&ds).unwrap().counts(), &[4, 0]);
    }

    #[test]
    fn released_counts_bounds() {
        assert!(ReleasedCounts::new(vec![3], 2).is_err());
        assert!(ReleasedCounts::new(vec![0], 0).is_err());
    }

    #[test]
    fn rows_within_tolerance_are_renormalized() {
        let n = NodeSpec::root("A", labels(&["0", "1"]), vec![0.3, 0.7 + 5e-13]);
        let bn = BayesianNetwork::new(vec![n], &["A".into()], Encoding::RawBinary).unwrap();
        let s: f64 = bn.node(0).cpt[0].iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nodes_are_sorted_topologically() {
        let child = NodeSpec::new(
            "B",
            labels(&["0", "1"]),
            labels(&["A"]),
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
        );
        let bn = BayesianNetwork::new(
            vec![child, coin("A", 0.4)],
            &["B".into()],
            Encoding::RawBinary,
        )
        .unwrap();
        assert_eq!(bn.node(0).name, "A");
        assert_eq!(bn.parent_indices(1), &[0]);
    }
}
