//! Economies, allocations and price vectors.

use std::collections::HashSet;

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::valuation::{build_valuation, SubmodularityIndex, Valuation, ValuationSpec};

#[derive(Debug, Clone)]
pub struct Agent {
    pub name: String,
    pub valuation: Valuation,
    /// The description the valuation was built from; used when serializing.
    pub spec: ValuationSpec,
}

impl PartialEq for Agent {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.valuation == other.valuation
    }
}

/// Items plus agents with valuations over a common item universe.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    items: Vec<String>,
    agents: Vec<Agent>,
}

impl Economy {
    pub fn new(items: Vec<String>, agents: Vec<Agent>) -> Result<Self> {
        let m = items.len();
        if m == 0 {
            return Err(Error::InvalidEconomy("economy has no items".into()));
        }
        if m > MAX_ITEMS {
            return Err(Error::TooManyItems {
                got: m,
                limit: MAX_ITEMS,
            });
        }
        if agents.is_empty() {
            return Err(Error::InvalidEconomy("economy has no agents".into()));
        }
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.as_str()) {
                return Err(Error::InvalidEconomy(format!(
                    "duplicate item name {item:?}"
                )));
            }
        }
        let mut seen = HashSet::new();
        for agent in &agents {
            if !seen.insert(agent.name.as_str()) {
                return Err(Error::InvalidEconomy(format!(
                    "duplicate agent name {:?}",
                    agent.name
                )));
            }
            if agent.valuation.num_items() != m {
                return Err(Error::Dimension(format!(
                    "agent {:?} values {} items, economy has {m}",
                    agent.name,
                    agent.valuation.num_items()
                )));
            }
        }
        Ok(Economy { items, agents })
    }

    /// Builds an economy from named valuation specs.
    pub fn from_specs<S: Into<String>>(
        items: Vec<S>,
        agents: Vec<(S, ValuationSpec)>,
    ) -> Result<Self> {
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        let m = items.len();
        let agents = agents
            .into_iter()
            .map(|(name, spec)| {
                let valuation = build_valuation(m, &spec)?;
                Ok(Agent {
                    name: name.into(),
                    valuation,
                    spec,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Economy::new(items, agents)
    }

    /// Builds an economy from raw tables, with default names `0, 1, ..` for
    /// items and agents.
    pub fn from_valuations(valuations: Vec<Valuation>) -> Result<Self> {
        let m = valuations
            .first()
            .map(Valuation::num_items)
            .ok_or_else(|| Error::InvalidEconomy("economy has no agents".into()))?;
        let items = (0..m).map(|j| format!("i{j}")).collect();
        let agents = valuations
            .into_iter()
            .enumerate()
            .map(|(i, valuation)| Agent {
                name: format!("agent{i}"),
                spec: explicit_spec(&valuation),
                valuation,
            })
            .collect();
        Economy::new(items, agents)
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.agents[agent].valuation
    }

    pub fn full_bundle(&self) -> Bundle {
        Bundle::full(self.num_items())
    }

    pub fn item_index(&self, name: &str) -> Option<usize> {
        self.items.iter().position(|i| i == name)
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name == name)
    }

    /// Per-agent submodularity indices.
    pub fn submodularity_indices(&self) -> Vec<SubmodularityIndex> {
        self.agents
            .iter()
            .map(|a| a.valuation.submodularity_index())
            .collect()
    }

    /// The economy's index: the maximum over agents.
    pub fn submodularity_index(&self) -> SubmodularityIndex {
        self.submodularity_indices()
            .into_iter()
            .fold(SubmodularityIndex::Finite(1.0), SubmodularityIndex::max)
    }

    pub fn check_allocation(&self, f: &Allocation) -> Result<()> {
        if f.num_items() != self.num_items() {
            return Err(Error::Dimension(format!(
                "allocation covers {} items, economy has {}",
                f.num_items(),
                self.num_items()
            )));
        }
        if let Some((item, agent)) = f
            .assignment()
            .iter()
            .enumerate()
            .find_map(|(j, a)| a.filter(|&a| a >= self.num_agents()).map(|a| (j, a)))
        {
            return Err(Error::Dimension(format!(
                "item {item} assigned to agent {agent}, economy has {} agents",
                self.num_agents()
            )));
        }
        Ok(())
    }

    pub fn check_prices(&self, p: &PriceVector) -> Result<()> {
        if p.len() != self.num_items() {
            return Err(Error::Dimension(format!(
                "price vector has {} entries, economy has {} items",
                p.len(),
                self.num_items()
            )));
        }
        Ok(())
    }
}

/// Explicit spec listing every positive entry of a table.
pub fn explicit_spec(v: &Valuation) -> ValuationSpec {
    ValuationSpec::Explicit(
        v.table()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, x)| **x != 0.0)
            .map(|(m, x)| (Bundle::from_mask(m as u32), *x))
            .collect(),
    )
}

/// Item → agent map; `None` means unallocated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    assignment: Vec<Option<usize>>,
}

impl Allocation {
    pub fn new(assignment: Vec<Option<usize>>) -> Self {
        Allocation { assignment }
    }

    pub fn unallocated(num_items: usize) -> Self {
        Allocation {
            assignment: vec![None; num_items],
        }
    }

    /// Every item to one agent.
    pub fn all_to(num_items: usize, agent: usize) -> Self {
        Allocation {
            assignment: vec![Some(agent); num_items],
        }
    }

    /// Total allocation from a per-item agent list.
    pub fn total(owners: &[usize]) -> Self {
        Allocation {
            assignment: owners.iter().map(|&a| Some(a)).collect(),
        }
    }

    /// Builds an allocation from per-agent bundles; bundles must be disjoint.
    pub fn from_bundles(num_items: usize, bundles: &[Bundle]) -> Result<Self> {
        let mut assignment = vec![None; num_items];
        for (agent, b) in bundles.iter().enumerate() {
            for j in b.items() {
                if j >= num_items {
                    return Err(Error::ItemOutOfRange {
                        index: j,
                        num_items,
                    });
                }
                if let Some(prev) = assignment[j] {
                    return Err(Error::Dimension(format!(
                        "item {j} given to both agent {prev} and agent {agent}"
                    )));
                }
                assignment[j] = Some(agent);
            }
        }
        Ok(Allocation { assignment })
    }

    pub fn num_items(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn owner(&self, item: usize) -> Option<usize> {
        self.assignment[item]
    }

    pub fn assign(&mut self, item: usize, agent: Option<usize>) {
        self.assignment[item] = agent;
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn first_unallocated(&self) -> Option<usize> {
        self.assignment.iter().position(Option::is_none)
    }

    pub fn unallocated_bundle(&self) -> Bundle {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_none())
            .map(|(j, _)| j)
            .collect()
    }

    /// `S_i^f` for each of `num_agents` agents.
    pub fn bundles(&self, num_agents: usize) -> Vec<Bundle> {
        let mut out = vec![Bundle::EMPTY; num_agents];
        for (j, a) in self.assignment.iter().enumerate() {
            if let Some(a) = *a {
                out[a] = out[a].with(j);
            }
        }
        out
    }

    pub fn bundle_of(&self, agent: usize) -> Bundle {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == Some(agent))
            .map(|(j, _)| j)
            .collect()
    }
}

/// Nonnegative per-item prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        for (item, &price) in prices.iter().enumerate() {
            if !(price >= 0.0) || !price.is_finite() {
                return Err(Error::NegativePrice { item, price });
            }
        }
        Ok(PriceVector(prices))
    }

    pub fn zeros(num_items: usize) -> Self {
        PriceVector(vec![0.0; num_items])
    }

    pub fn uniform(num_items: usize, price: f64) -> Result<Self> {
        PriceVector::new(vec![price; num_items])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    #[inline]
    pub fn get(&self, item: usize) -> f64 {
        self.0[item]
    }

    /// `Σ_{j∈B} p_j`.
    #[inline]
    pub fn total(&self, bundle: Bundle) -> f64 {
        bundle.items().map(|j| self.0[j]).sum()
    }

    /// Totals for every bundle over `m` items, indexed by mask.
    pub fn bundle_totals(&self) -> Vec<f64> {
        let m = self.0.len();
        let mut totals = vec![0.0; 1 << m];
        for mask in 1usize..1 << m {
            let low = mask.trailing_zeros() as usize;
            totals[mask] = totals[mask & (mask - 1)] + self.0[low];
        }
        totals
    }
}

/// `val(f) = Σ_i v_i(S_i^f)`.
pub fn social_value(e: &Economy, f: &Allocation) -> Result<f64> {
    e.check_allocation(f)?;
    Ok(social_value_unchecked(e, f))
}

pub(crate) fn social_value_unchecked(e: &Economy, f: &Allocation) -> f64 {
    f.bundles(e.num_agents())
        .iter()
        .enumerate()
        .map(|(i, &b)| e.valuation(i).value(b))
        .sum()
}
