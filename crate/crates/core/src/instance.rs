use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::matroid::{ElementId, Matroid};
use crate::scalar::Scalar;
use crate::submodular::Objective;
use crate::Rational;

/// A ground-set member. Its stream position is assigned per run.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<S> {
    pub id: String,
    pub weight: S,
}

/// Ground set, constraints, objective and an optional default stream order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S> {
    pub elements: Vec<Element<S>>,
    pub matroids: Vec<Matroid>,
    pub objective: Objective<S>,
    pub stream_order: Option<Vec<ElementId>>,
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl<S: Scalar> Instance<S> {
    /// Builds and validates an instance with a linear objective taken from the
    /// element weights.
    pub fn linear(elements: Vec<Element<S>>, matroids: Vec<Matroid>) -> Result<Self> {
        let objective = Objective::Linear(elements.iter().map(|e| e.weight.clone()).collect());
        let inst = Instance {
            elements,
            matroids,
            objective,
            stream_order: None,
            meta: BTreeMap::new(),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_objective(mut self, objective: Objective<S>) -> Result<Self> {
        self.objective = objective;
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn k(&self) -> usize {
        self.matroids.len()
    }

    pub fn weight(&self, e: ElementId) -> &S {
        &self.elements[e].weight
    }

    pub fn name(&self, e: ElementId) -> &str {
        &self.elements[e].id
    }

    /// Looks an element up by its string id.
    pub fn index_of(&self, id: &str) -> Option<ElementId> {
        self.elements.iter().position(|e| e.id == id)
    }

    pub fn ids(&self, ids: &[&str]) -> Vec<ElementId> {
        ids.iter()
            .map(|s| self.index_of(s).unwrap_or_else(|| panic!("no element named {s}")))
            .collect()
    }

    /// The order given in the instance, or element-list order.
    pub fn file_order(&self) -> Vec<ElementId> {
        self.stream_order.clone().unwrap_or_else(|| (0..self.len()).collect())
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.matroids.iter().map(Matroid::full_rank).collect()
    }

    /// Is `set` independent in every matroid?
    pub fn common_independent(&self, set: &[ElementId]) -> bool {
        self.matroids.iter().all(|m| m.independent(set))
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.objective, Objective::Linear(_))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let mut seen = HashMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            if let Some(j) = seen.insert(e.id.as_str(), i) {
                return Err(Error::Instance(format!(
                    "duplicate element id {:?} at {j} and {i}",
                    e.id
                )));
            }
            if e.weight.is_negative_value() {
                return Err(Error::Instance(format!("element {:?} has a negative weight", e.id)));
            }
        }
        if self.matroids.is_empty() {
            return Err(Error::Instance("an instance needs at least one matroid".into()));
        }
        for (i, m) in self.matroids.iter().enumerate() {
            if m.ground_size() != n {
                return Err(Error::Instance(format!(
                    "matroid {i} covers {} elements, instance has {n}",
                    m.ground_size()
                )));
            }
        }
        if let Some(order) = &self.stream_order {
            check_permutation(order, n)?;
        }
        self.objective.validate(n)
    }
}

impl Instance<Rational> {
    /// Converts every weight to another scalar type.
    pub fn convert<T: Scalar>(&self) -> Instance<T> {
        let conv = |w: &Rational| T::from_rational(w);
        Instance {
            elements: self
                .elements
                .iter()
                .map(|e| Element {
                    id: e.id.clone(),
                    weight: conv(&e.weight),
                })
                .collect(),
            matroids: self.matroids.clone(),
            objective: self.objective.map_scalar(&conv),
            stream_order: self.stream_order.clone(),
            meta: self.meta.clone(),
        }
    }
}

pub(crate) fn check_permutation(order: &[ElementId], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::Instance(format!(
            "stream order lists {} elements, instance has {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &e in order {
        match seen.get_mut(e) {
            None => return Err(Error::UnknownElement(e)),
            Some(true) => return Err(Error::Instance(format!("stream order repeats element {e}"))),
            Some(s) => *s = true,
        }
    }
    Ok(())
}
