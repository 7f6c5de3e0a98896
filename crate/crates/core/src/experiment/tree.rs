use super::outcome::{WBarOutcome, WOutcome};
use super::protocol::{Protocol, Step};
use super::time::TimePoint;
use super::ExperimentError;
use crate::statevec::{born_probability, collapse, Ket, StateError, TOLERANCE};
use serde::{Deserialize, Serialize};

/// Label used on nodes of steps that do not select a branch from outside.
pub const RECORDED: &str = "recorded";

#[derive(Debug, Clone, PartialEq)]
pub struct BranchNode {
    pub step: Step,
    pub time: TimePoint,
    pub outcome: String,
    /// Probability of this node given its parent.
    pub probability: f64,
    /// Post-step state; `None` for zero-probability branches.
    pub state: Option<Ket>,
    pub children: Vec<BranchNode>,
}

impl BranchNode {
    fn spine(step: Step, time: TimePoint, outcome: &str, state: Ket) -> Self {
        Self {
            step,
            time,
            outcome: outcome.to_owned(),
            probability: 1.0,
            state: Some(state),
            children: Vec::new(),
        }
    }

    pub fn child(&self, outcome: &str) -> Option<&BranchNode> {
        self.children.iter().find(|c| c.outcome == outcome)
    }
}

/// W's exact description of one round: the unbranched stages followed by
/// the W̄ and W measurement branches.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTree {
    pub root: BranchNode,
}

/// A root-to-leaf path with its total probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf<'a> {
    pub path: Vec<&'a str>,
    pub probability: f64,
    pub node: &'a BranchNode,
}

/// Exact evolution of the whole round.
pub fn evolve_exact(protocol: &Protocol) -> BranchTree {
    evolve_through(protocol, Step::WMeasuresL).expect("valid protocol evolves")
}

/// Exact evolution stopped after `last`; a tree that stops before W's
/// measurement is incomplete for [`joint_distribution`].
pub fn evolve_through(protocol: &Protocol, last: Step) -> Result<BranchTree, ExperimentError> {
    let stages = protocol.stages();
    let mut spine: Vec<BranchNode> = stages
        .iter()
        .take_while(|s| s.step <= last)
        .map(|s| {
            let label = match s.step {
                Step::Initialize => "init",
                Step::FBarSendsSpin => "relabelled",
                _ => RECORDED,
            };
            BranchNode::spine(s.step, s.time, label, s.state.clone())
        })
        .collect();

    if last >= Step::WBarMeasuresLBar {
        let pre = protocol.pre_measurement_state();
        let mut branches = Vec::new();
        for wbar in WBarOutcome::ALL {
            let mut node = measure(
                pre,
                protocol.wbar_projector(wbar),
                Step::WBarMeasuresLBar,
                protocol.time_of(Step::WBarMeasuresLBar),
                wbar.label(),
            )?;
            if last >= Step::WMeasuresL {
                if let Some(state) = node.state.clone() {
                    for w in WOutcome::ALL {
                        node.children.push(measure(
                            &state,
                            protocol.w_projector(w),
                            Step::WMeasuresL,
                            protocol.time_of(Step::WMeasuresL),
                            w.label(),
                        )?);
                    }
                }
            }
            branches.push(node);
        }
        spine.last_mut().expect("four stages").children = branches;
    }

    // fold the spine into nested single-child nodes
    let mut node = spine.pop().expect("non-empty spine");
    while let Some(mut parent) = spine.pop() {
        parent.children = vec![node];
        node = parent;
    }
    Ok(BranchTree { root: node })
}

fn measure(
    state: &Ket,
    proj: &crate::statevec::Projector,
    step: Step,
    time: TimePoint,
    label: &str,
) -> Result<BranchNode, StateError> {
    let p = born_probability(state, proj)?;
    let post = if p > TOLERANCE {
        Some(collapse(state, proj)?.0)
    } else {
        None
    };
    Ok(BranchNode {
        step,
        time,
        outcome: label.to_owned(),
        probability: p,
        state: post,
        children: Vec::new(),
    })
}

impl BranchTree {
    /// Number of measurement steps on the deepest path.
    pub fn measurement_depth(&self) -> usize {
        fn go(n: &BranchNode) -> usize {
            let here = usize::from(n.step.is_measurement());
            here + n.children.iter().map(go).max().unwrap_or(0)
        }
        go(&self.root)
    }

    /// Unbranched node for `step`, if the tree reaches it.
    pub fn stage(&self, step: Step) -> Option<&BranchNode> {
        let mut node = &self.root;
        loop {
            if node.step == step {
                return Some(node);
            }
            if node.children.len() != 1 {
                return None;
            }
            node = &node.children[0];
        }
    }

    /// Node after W̄'s measurement with result `wbar`.
    pub fn wbar_branch(&self, wbar: WBarOutcome) -> Option<&BranchNode> {
        self.stage(Step::FMeasuresS)?.child(wbar.label())
    }

    pub fn leaf(&self, wbar: WBarOutcome, w: WOutcome) -> Option<&BranchNode> {
        self.wbar_branch(wbar)?.child(w.label())
    }

    pub fn leaves(&self) -> Vec<Leaf<'_>> {
        fn go<'a>(n: &'a BranchNode, path: &mut Vec<&'a str>, p: f64, out: &mut Vec<Leaf<'a>>) {
            path.push(&n.outcome);
            let p = p * n.probability;
            if n.children.is_empty() {
                out.push(Leaf {
                    path: path.clone(),
                    probability: p,
                    node: n,
                });
            } else {
                for c in &n.children {
                    go(c, path, p, out);
                }
            }
            path.pop();
        }
        let mut out = Vec::new();
        go(&self.root, &mut Vec::new(), 1.0, &mut out);
        out
    }

    /// Largest deviation from 1 of the children's probability sum over all
    /// internal nodes.
    pub fn max_branch_defect(&self) -> f64 {
        fn go(n: &BranchNode) -> f64 {
            if n.children.is_empty() {
                return 0.0;
            }
            let here = (n.children.iter().map(|c| c.probability).sum::<f64>() - 1.0).abs();
            n.children.iter().map(go).fold(here, f64::max)
        }
        go(&self.root)
    }
}

/// Exact distribution of the pair (w̄, w).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeTable {
    /// Indexed `[wbar.index()][w.index()]`.
    cells: [[f64; 2]; 2],
}

impl OutcomeTable {
    pub fn from_cells(cells: [[f64; 2]; 2]) -> Self {
        Self { cells }
    }

    pub fn get(&self, wbar: WBarOutcome, w: WOutcome) -> f64 {
        self.cells[wbar.index()][w.index()]
    }

    /// Cells in report order: (okbar, ok), (okbar, fails), (failsbar, ok),
    /// (failsbar, fails).
    pub fn cells(&self) -> impl Iterator<Item = (WBarOutcome, WOutcome, f64)> + '_ {
        WBarOutcome::ALL
            .into_iter()
            .flat_map(|a| WOutcome::ALL.into_iter().map(move |b| (a, b)))
            .map(|(a, b)| (a, b, self.get(a, b)))
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().flatten().sum()
    }

    pub fn marginal_wbar(&self, wbar: WBarOutcome) -> f64 {
        self.cells[wbar.index()].iter().sum()
    }

    pub fn marginal_w(&self, w: WOutcome) -> f64 {
        self.cells.iter().map(|row| row[w.index()]).sum()
    }

    /// `P(w | w̄)`, or `None` when `P(w̄) = 0`.
    pub fn conditional(&self, w: WOutcome, given: WBarOutcome) -> Option<f64> {
        let m = self.marginal_wbar(given);
        (m > TOLERANCE).then(|| self.get(given, w) / m)
    }
}

/// Joint table of W̄'s and W's results from a complete tree.
pub fn joint_distribution(tree: &BranchTree) -> Result<OutcomeTable, ExperimentError> {
    let parent = tree.stage(Step::FMeasuresS).ok_or(ExperimentError::IncompleteTree)?;
    let mut cells = [[0.0; 2]; 2];
    for wbar in WBarOutcome::ALL {
        let node = parent.child(wbar.label()).ok_or(ExperimentError::IncompleteTree)?;
        if node.probability <= TOLERANCE {
            continue;
        }
        for w in WOutcome::ALL {
            let leaf = node.child(w.label()).ok_or(ExperimentError::IncompleteTree)?;
            cells[wbar.index()][w.index()] = node.probability * leaf.probability;
        }
    }
    Ok(OutcomeTable { cells })
}
