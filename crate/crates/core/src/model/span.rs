use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// Half-open interval `[start, end)` of character offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharSpan {
    start: usize,
    end: usize,
}

impl CharSpan {
    pub fn new(start: usize, end: usize) -> Result<Self, ModelError> {
        if start >= end {
            return Err(ModelError::EmptySpan { start, end });
        }
        Ok(CharSpan { start, end })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, other: &CharSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: &CharSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn intersection_len(&self, other: &CharSpan) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }
}

impl fmt::Display for CharSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

impl Serialize for CharSpan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.start, self.end].serialize(s)
    }
}

impl<'de> Deserialize<'de> for CharSpan {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [start, end] = <[usize; 2]>::deserialize(d)?;
        CharSpan::new(start, end).map_err(serde::de::Error::custom)
    }
}

/// Canonical set of character positions stored as sorted, disjoint,
/// non-adjacent spans.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SpanSet {
    spans: Vec<CharSpan>,
}

impl SpanSet {
    pub fn new<I: IntoIterator<Item = CharSpan>>(spans: I) -> Self {
        let mut v: Vec<CharSpan> = spans.into_iter().collect();
        v.sort();
        let mut out: Vec<CharSpan> = Vec::with_capacity(v.len());
        for s in v {
            match out.last_mut() {
                Some(last) if s.start <= last.end => last.end = last.end.max(s.end),
                _ => out.push(s),
            }
        }
        SpanSet { spans: out }
    }

    pub fn single(span: CharSpan) -> Self {
        SpanSet { spans: vec![span] }
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self, ModelError> {
        let spans = pairs
            .iter()
            .map(|&(s, e)| CharSpan::new(s, e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SpanSet::new(spans))
    }

    pub fn spans(&self) -> &[CharSpan] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Number of character positions covered.
    pub fn len(&self) -> usize {
        self.spans.iter().map(CharSpan::len).sum()
    }

    pub fn is_discontinuous(&self) -> bool {
        self.spans.len() > 1
    }

    /// Smallest single span covering the whole set.
    pub fn hull(&self) -> Option<CharSpan> {
        let first = self.spans.first()?;
        let last = self.spans.last()?;
        Some(CharSpan {
            start: first.start,
            end: last.end,
        })
    }

    pub fn max_end(&self) -> Option<usize> {
        self.spans.last().map(|s| s.end)
    }

    pub fn overlaps(&self, other: &SpanSet) -> bool {
        overlap_chars(self, other) > 0
    }

    pub fn contains_set(&self, other: &SpanSet) -> bool {
        overlap_chars(self, other) == other.len()
    }

    pub fn contains_span(&self, span: &CharSpan) -> bool {
        self.spans.iter().any(|s| s.contains(span))
    }

    pub fn union(&self, other: &SpanSet) -> SpanSet {
        SpanSet::new(self.spans.iter().chain(other.spans.iter()).copied())
    }

    /// Positions in `self` that are not in `other`.
    pub fn difference(&self, other: &SpanSet) -> SpanSet {
        let mut out = Vec::new();
        let mut j = 0;
        for s in &self.spans {
            let mut cur = s.start;
            while j < other.spans.len() && other.spans[j].end <= cur {
                j += 1;
            }
            let mut k = j;
            while k < other.spans.len() && other.spans[k].start < s.end {
                let o = other.spans[k];
                if o.start > cur {
                    out.push(CharSpan {
                        start: cur,
                        end: o.start,
                    });
                }
                cur = cur.max(o.end);
                if cur >= s.end {
                    break;
                }
                k += 1;
            }
            if cur < s.end {
                out.push(CharSpan { start: cur, end: s.end });
            }
        }
        SpanSet { spans: out }
    }
}

impl From<CharSpan> for SpanSet {
    fn from(span: CharSpan) -> Self {
        SpanSet::single(span)
    }
}

impl fmt::Display for SpanSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.spans.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SpanSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.spans.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpanSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spans = Vec::<CharSpan>::deserialize(d)?;
        Ok(SpanSet::new(spans))
    }
}

/// Count of character positions present in both sets.
pub fn overlap_chars(a: &SpanSet, b: &SpanSet) -> usize {
    let (a, b) = (&a.spans, &b.spans);
    let (mut i, mut j, mut total) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        total += a[i].intersection_len(&b[j]);
        if a[i].end <= b[j].end {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// Count of character positions in `candidate` but not in `target`.
pub fn margin_chars(candidate: &SpanSet, target: &SpanSet) -> usize {
    candidate.len() - overlap_chars(candidate, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(usize, usize)]) -> SpanSet {
        SpanSet::from_pairs(pairs).unwrap()
    }

    #[test]
    fn empty_span_rejected() {
        assert!(CharSpan::new(3, 3).is_err());
        assert!(CharSpan::new(4, 3).is_err());
    }

    #[test]
    fn canonicalization_merges_adjacent_and_overlapping() {
        let s = set(&[(10, 20), (0, 5), (5, 8), (15, 25)]);
        assert_eq!(s, set(&[(0, 8), (10, 25)]));
        assert_eq!(s.spans().len(), 2);
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_chars(&set(&[(0, 100)]), &set(&[(0, 100)])), 100);
        assert_eq!(overlap_chars(&set(&[(10, 20)]), &set(&[(0, 30)])), 10);
        assert_eq!(overlap_chars(&set(&[(0, 5), (20, 25)]), &set(&[(3, 22)])), 4);
    }

    #[test]
    fn margin_examples() {
        assert_eq!(margin_chars(&set(&[(0, 30)]), &set(&[(10, 20)])), 20);
        assert_eq!(margin_chars(&set(&[(10, 20)]), &set(&[(10, 20)])), 0);
        assert_eq!(margin_chars(&set(&[(0, 5), (20, 25)]), &set(&[(3, 22)])), 6);
    }

    #[test]
    fn difference_and_hull() {
        let a = set(&[(0, 10), (20, 30)]);
        let b = set(&[(2, 4), (8, 22), (29, 40)]);
        assert_eq!(a.difference(&b), set(&[(0, 2), (4, 8), (22, 29)]));
        assert_eq!(a.hull(), Some(CharSpan::new(0, 30).unwrap()));
        assert!(a.is_discontinuous());
    }

    #[test]
    fn serde_round_trip() {
        let a = set(&[(0, 4), (6, 9)]);
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, "[[0,4],[6,9]]");
        let back: SpanSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<CharSpan>("[5,5]").is_err());
    }
}
