//! Finite labeled value spaces.
//!
//! Every model variable (states, actions, observation increments, initial
//! information, compressed summaries) ranges over a [`Space`]: an ordered,
//! nonempty list of distinct labels. Values are passed around as indices into
//! the label list; labels only matter for IO and diagnostics.

use serde::{Deserialize, Serialize};

/// An ordered finite set of named values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Space {
    /// Role of the space in diagnostics, e.g. `"x[2]"` or `"u[1] alice"`.
    pub name: String,
    /// Value labels; order is the canonical value order.
    pub labels: Vec<String>,
}

impl Space {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Self {
        Space { name: name.into(), labels }
    }

    /// Space with a single value; used for players who do not move or
    /// observe anything at some stage.
    pub fn singleton(name: impl Into<String>) -> Self {
        Space { name: name.into(), labels: vec!["*".to_string()] }
    }

    /// Space with labels `0..n`.
    pub fn numbered(name: impl Into<String>, n: usize) -> Self {
        Space {
            name: name.into(),
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    /// Labels must be distinct and the space nonempty.
    pub fn well_formed(&self) -> bool {
        if self.labels.is_empty() {
            return false;
        }
        let mut seen = self.labels.clone();
        seen.sort();
        seen.dedup();
        seen.len() == self.labels.len()
    }
}

/// Mixed-radix codec for tuples over several spaces (joint actions, joint
/// increments, per-player history indices). The first component varies
/// slowest so that encoded order equals lexicographic order on tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleCodec {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl TupleCodec {
    /// Panics if the product overflows; model validation guards sizes first.
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut strides = vec![0usize; sizes.len()];
        let mut acc: usize = 1;
        for (i, &s) in sizes.iter().enumerate().rev() {
            strides[i] = acc;
            acc = acc.checked_mul(s).expect("tuple space overflows usize");
        }
        TupleCodec { sizes, strides, len: acc }
    }

    /// Number of tuples.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.sizes.len());
        let mut code = 0;
        for (i, &v) in tuple.iter().enumerate() {
            debug_assert!(v < self.sizes[i]);
            code += v * self.strides[i];
        }
        code
    }

    pub fn decode(&self, mut code: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.sizes.len()];
        for (i, &s) in self.strides.iter().enumerate() {
            out[i] = code / s;
            code %= s;
        }
        out
    }

    /// Single component of an encoded tuple without full decoding.
    pub fn component(&self, code: usize, i: usize) -> usize {
        (code / self.strides[i]) % self.sizes[i]
    }

    /// Iterate over all codes.
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        0..self.len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_codec_round_trips() {
        let c = TupleCodec::new(vec![3, 1, 4]);
        assert_eq!(c.len(), 12);
        for code in c.iter() {
            let t = c.decode(code);
            assert_eq!(c.encode(&t), code);
            for i in 0..3 {
                assert_eq!(c.component(code, i), t[i]);
            }
        }
    }

    #[test]
    fn tuple_codec_orders_lexicographically() {
        let c = TupleCodec::new(vec![2, 3]);
        assert_eq!(c.encode(&[0, 0]), 0);
        assert_eq!(c.encode(&[0, 2]), 2);
        assert_eq!(c.encode(&[1, 0]), 3);
    }

    #[test]
    fn space_well_formed_rejects_duplicates() {
        assert!(Space::new("x", vec!["a".into(), "b".into()]).well_formed());
        assert!(!Space::new("x", vec!["a".into(), "a".into()]).well_formed());
        assert!(!Space::new("x", vec![]).well_formed());
    }
}
