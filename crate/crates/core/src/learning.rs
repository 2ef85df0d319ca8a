//! Attacker-side models fitted from a public proxy sample.

use std::io::{Read, Write};

use crate::bn::{BayesianNetwork, Encoding, NodeSpec, Record};
use crate::error::{Error, Result};

/// `m` full records over a set of named discrete columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyDataset {
    names: Vec<String>,
    states: Vec<Vec<String>>,
    records: Vec<Record>,
}

impl ProxyDataset {
    pub fn new(names: Vec<String>, states: Vec<Vec<String>>, records: Vec<Record>) -> Result<Self> {
        if names.len() != states.len() {
            return Err(Error::contract("one state list per column required"));
        }
        if records.is_empty() {
            return Err(Error::contract("a proxy dataset needs at least one record"));
        }
        for r in &records {
            if r.0.len() != names.len() {
                return Err(Error::contract(format!(
                    "record assigns {} columns, expected {}",
                    r.0.len(),
                    names.len()
                )));
            }
            if let Some((j, _)) = r.0.iter().enumerate().find(|(j, &s)| s >= states[*j].len()) {
                return Err(Error::contract(format!(
                    "state out of range in column {}",
                    names[j]
                )));
            }
        }
        Ok(ProxyDataset {
            names,
            states,
            records,
        })
    }

    /// Wraps full records sampled from `bn`.
    pub fn from_network(bn: &BayesianNetwork, records: Vec<Record>) -> Result<Self> {
        ProxyDataset::new(
            bn.nodes().iter().map(|n| n.name.clone()).collect(),
            bn.nodes().iter().map(|n| n.states.clone()).collect(),
            records,
        )
    }

    /// Reads a CSV with a header of column names and state labels as values.
    /// With a schema network, columns must name its nodes and values must be
    /// its state labels; without one, each column's states are its distinct
    /// labels in sorted order.
    pub fn read_csv<R: Read>(reader: R, schema: Option<&BayesianNetwork>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let rows: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
        let states: Vec<Vec<String>> = match schema {
            Some(bn) => names
                .iter()
                .map(|name| {
                    bn.index_of(name)
                        .map(|i| bn.node(i).states.clone())
                        .ok_or_else(|| Error::contract(format!("unknown column `{name}`")))
                })
                .collect::<Result<_>>()?,
            None => (0..names.len())
                .map(|j| {
                    let mut labels: Vec<String> = rows
                        .iter()
                        .filter_map(|r| r.get(j).map(str::to_string))
                        .collect();
                    labels.sort();
                    labels.dedup();
                    labels
                })
                .collect(),
        };
        let mut records = Vec::with_capacity(rows.len());
        for (line, row) in rows.iter().enumerate() {
            let mut rec = Vec::with_capacity(names.len());
            for (j, label) in row.iter().enumerate() {
                let s = states[j].iter().position(|s| s == label).ok_or_else(|| {
                    Error::contract(format!(
                        "row {}: `{label}` is not a state of {}",
                        line + 2,
                        names[j]
                    ))
                })?;
                rec.push(s);
            }
            records.push(Record(rec));
        }
        ProxyDataset::new(names, states, records)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        for r in &self.records {
            w.write_record(
                r.0.iter()
                    .enumerate()
                    .map(|(j, &s)| self.states[j][s].as_str()),
            )?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn states(&self) -> &[Vec<String>] {
        &self.states
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

    fn column(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::contract(format!("proxy has no column `{name}`")))
    }

    /// Records re-indexed to `bn`'s node order and state indices.
    fn aligned(&self, bn: &BayesianNetwork) -> Result<Vec<Vec<usize>>> {
        let mut maps = Vec::with_capacity(bn.node_count());
        for node in bn.nodes() {
            let col = self.column(&node.name)?;
            let remap = self.states[col]
                .iter()
                .map(|label| {
                    node.state_index(label).ok_or_else(|| {
                        Error::contract(format!("`{label}` is not a state of {}", node.name))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            maps.push((col, remap));
        }
        Ok(self
            .records
            .iter()
            .map(|r| maps.iter().map(|(col, remap)| remap[r.0[*col]]).collect())
            .collect())
    }
}

/// Refits every CPT of `structure` from proxy counts:
/// `(count + α) / (row_total + α·k)`, with a uniform row when both are zero.
pub fn mle_fit(
    structure: &BayesianNetwork,
    proxy: &ProxyDataset,
    alpha: f64,
) -> Result<BayesianNetwork> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::contract(format!(
            "smoothing α = {alpha} must be finite and ≥ 0"
        )));
    }
    let rows = proxy.aligned(structure)?;
    let mut cpts: Vec<Vec<Vec<f64>>> = structure
        .nodes()
        .iter()
        .map(|n| vec![vec![0.0; n.cardinality()]; n.cpt.len()])
        .collect();
    for full in &rows {
        for (i, cpt) in cpts.iter_mut().enumerate() {
            cpt[structure.row_index(i, full)][full[i]] += 1.0;
        }
    }
    for cpt in &mut cpts {
        for row in cpt.iter_mut() {
            let k = row.len() as f64;
            let total: f64 = row.iter().sum::<f64>() + alpha * k;
            if total == 0.0 {
                row.iter_mut().for_each(|p| *p = 1.0 / k);
            } else {
                row.iter_mut().for_each(|p| *p = (*p + alpha) / total);
            }
        }
    }
    structure.with_cpts(cpts)
}

/// Empirical mutual information of two columns from α-smoothed cell counts.
fn mutual_information(proxy: &ProxyDataset, a: usize, b: usize, alpha: f64) -> f64 {
    let ka = proxy.states[a].len();
    let kb = proxy.states[b].len();
    let mut joint = vec![alpha; ka * kb];
    for r in &proxy.records {
        joint[r.0[a] * kb + r.0[b]] += 1.0;
    }
    let total: f64 = joint.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut pa = vec![0.0; ka];
    let mut pb = vec![0.0; kb];
    for i in 0..ka {
        for j in 0..kb {
            let p = joint[i * kb + j] / total;
            pa[i] += p;
            pb[j] += p;
        }
    }
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let p = joint[i * kb + j] / total;
            if p > 0.0 {
                mi += p * (p / (pa[i] * pb[j])).ln();
            }
        }
    }
    mi.max(0.0)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Undirected edges of the maximum mutual-information spanning tree, as
/// column-index pairs. Equal weights are broken by edge name.
pub fn chow_liu_edges(proxy: &ProxyDataset, alpha: f64) -> Vec<(usize, usize, f64)> {
    let k = proxy.names.len();
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let (x, y) = if proxy.names[a] <= proxy.names[b] {
                (a, b)
            } else {
                (b, a)
            };
            edges.push((x, y, mutual_information(proxy, a, b, alpha)));
        }
    }
    edges.sort_by(|e, f| {
        f.2.total_cmp(&e.2)
            .then_with(|| proxy.names[e.0].cmp(&proxy.names[f.0]))
            .then_with(|| proxy.names[e.1].cmp(&proxy.names[f.1]))
    });
    let mut uf: Vec<usize> = (0..k).collect();
    let mut tree = Vec::with_capacity(k.saturating_sub(1));
    for (a, b, w) in edges {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra != rb {
            uf[ra] = rb;
            tree.push((a, b, w));
        }
    }
    tree
}

/// Learns a tree-structured network rooted at the proxy's first column, then
/// fits its CPTs with [`mle_fit`].
pub fn chow_liu_fit(
    proxy: &ProxyDataset,
    alpha: f64,
    outputs: &[String],
    encoding: Encoding,
) -> Result<BayesianNetwork> {
    if proxy.len() < 2 {
        return Err(Error::contract(
            "structure learning needs at least two proxy records",
        ));
    }
    let k = proxy.names.len();
    let mut adj = vec![Vec::new(); k];
    for (a, b, _) in chow_liu_edges(proxy, alpha) {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent: Vec<Option<usize>> = vec![None; k];
    let mut seen = vec![false; k];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        adj[u].sort_unstable();
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    let nodes: Vec<NodeSpec> = (0..k)
        .map(|i| {
            let card = proxy.states[i].len();
            let (parents, rows) = match parent[i] {
                Some(p) => (vec![proxy.names[p].clone()], proxy.states[p].len()),
                None => (Vec::new(), 1),
            };
            NodeSpec::new(
                proxy.names[i].clone(),
                proxy.states[i].clone(),
                parents,
                vec![vec![1.0 / card as f64; card]; rows],
            )
        })
        .collect();
    let skeleton = BayesianNetwork::new(nodes, outputs, encoding)?;
    mle_fit(&skeleton, proxy, alpha)
}

/// Per-attribute frequencies of the proxy under the given outputs and
/// encoding, clamped to `[1/(2m), 1 − 1/(2m)]`.
pub fn empirical_marginals(
    proxy: &ProxyDataset,
    outputs: &[String],
    encoding: Encoding,
) -> Result<Vec<f64>> {
    let m = proxy.len() as f64;
    let lo = 1.0 / (2.0 * m);
    let hi = 1.0 - lo;
    let mut mu = Vec::new();
    for name in outputs {
        let col = proxy.column(name)?;
        let card = proxy.states[col].len();
        let mut freq = vec![0.0; card];
        for r in &proxy.records {
            freq[r.0[col]] += 1.0;
        }
        match encoding {
            Encoding::RawBinary => {
                if card != 2 {
                    return Err(Error::contract(format!(
                        "raw-binary encoding needs a binary column, {name} has {card} states"
                    )));
                }
                mu.push(freq[1] / m);
            }
            Encoding::OneHot => mu.extend(freq.iter().map(|f| f / m)),
        }
    }
    Ok(mu.into_iter().map(|x| x.clamp(lo, hi)).collect())
}
