use std::fmt;

use crate::error::{Error, Result};

/// Dense index into the class universe. New classes extend the universe;
/// existing ids are never renumbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl ClassId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for ClassId {
    fn from(id: u32) -> Self {
        ClassId(id)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Non-empty, strictly increasing set of class ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelSet(Vec<ClassId>);

impl LabelSet {
    /// Sorts and deduplicates `labels`. Fails if nothing is left.
    pub fn new<I, C>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: Into<ClassId>,
    {
        let mut labels: Vec<ClassId> = labels.into_iter().map(Into::into).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        Ok(LabelSet(labels))
    }

    pub fn single(class: impl Into<ClassId>) -> Self {
        LabelSet(vec![class.into()])
    }

    pub fn as_slice(&self) -> &[ClassId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_multi_label(&self) -> bool {
        self.0.len() > 1
    }

    pub fn contains(&self, class: ClassId) -> bool {
        self.0.binary_search(&class).is_ok()
    }

    /// Largest class id in the set.
    pub fn max_class(&self) -> ClassId {
        // non-empty by construction
        self.0[self.0.len() - 1]
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A stream element. The payload is carried along but never inspected by
/// any update strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub id: u64,
    pub labels: LabelSet,
    pub payload: Vec<u8>,
}

impl Sample {
    pub fn new(id: u64, labels: LabelSet) -> Self {
        Sample {
            id,
            labels,
            payload: Vec::new(),
        }
    }

    pub fn with_payload(mut self, payload: Vec<u8>) -> Self {
        self.payload = payload;
        self
    }
}

/// Anything that carries a label set.
pub trait Labeled {
    fn labels(&self) -> &LabelSet;
}

impl Labeled for Sample {
    fn labels(&self) -> &LabelSet {
        &self.labels
    }
}

impl Labeled for LabelSet {
    fn labels(&self) -> &LabelSet {
        self
    }
}

impl<T: Labeled> Labeled for &T {
    fn labels(&self) -> &LabelSet {
        (**self).labels()
    }
}
