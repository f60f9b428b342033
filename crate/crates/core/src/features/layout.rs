use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MGC: &str = "MGC";
pub const BAP: &str = "BAP";
pub const LF0: &str = "LF0";
pub const VUV: &str = "VUV";
pub const ULTPCA: &str = "ULTPCA";
pub const LING: &str = "LING";

/// One named block of columns. With `deltas`, the block holds
/// `[static | delta | delta-delta]`, each `width` wide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub width: usize,
    pub deltas: bool,
}

impl Segment {
    pub fn new(name: &str, width: usize, deltas: bool) -> Self {
        Self {
            name: name.to_string(),
            width,
            deltas,
        }
    }

    pub fn total(&self) -> usize {
        if self.deltas {
            3 * self.width
        } else {
            self.width
        }
    }
}

/// Ordered column layout of a [`FeatureMatrix`](super::FeatureMatrix).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StreamLayout {
    segments: Vec<Segment>,
}

impl StreamLayout {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for (i, s) in segments.iter().enumerate() {
            if s.width == 0 {
                return Err(Error::invalid(format!("segment {} has zero width", s.name)));
            }
            if segments[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::invalid(format!("duplicate segment {}", s.name)));
            }
        }
        Ok(Self { segments })
    }

    /// A single anonymous block without deltas.
    pub fn plain(name: &str, width: usize) -> Self {
        Self {
            segments: vec![Segment::new(name, width, false)],
        }
    }

    /// MGC 60, BAP 5, LF0 1 with deltas, then VUV 1.
    pub fn acoustic() -> Self {
        Self::acoustic_with(60, 5)
    }

    pub fn acoustic_with(mgc: usize, bap: usize) -> Self {
        Self {
            segments: vec![
                Segment::new(MGC, mgc, true),
                Segment::new(BAP, bap, true),
                Segment::new(LF0, 1, true),
                Segment::new(VUV, 1, false),
            ],
        }
    }

    /// ULT-PCA coefficients with deltas.
    pub fn articulatory(n_components: usize) -> Self {
        Self {
            segments: vec![Segment::new(ULTPCA, n_components, true)],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total(&self) -> usize {
        self.segments.iter().map(Segment::total).sum()
    }

    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }

    /// Columns occupied by a segment, including its delta blocks.
    pub fn range(&self, name: &str) -> Option<Range<usize>> {
        let mut offset = 0;
        for s in &self.segments {
            if s.name == name {
                return Some(offset..offset + s.total());
            }
            offset += s.total();
        }
        None
    }

    /// Columns of a segment's static block.
    pub fn static_range(&self, name: &str) -> Option<Range<usize>> {
        let r = self.range(name)?;
        let w = self.segment(name)?.width;
        Some(r.start..r.start + w)
    }

    /// Same segments with every delta flag cleared.
    pub fn statics(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(&s.name, s.width, false))
                .collect(),
        }
    }

    /// Same segments with deltas on every segment except VUV and LING.
    pub fn with_deltas(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(&s.name, s.width, s.name != VUV && s.name != LING))
                .collect(),
        }
    }

    /// Concatenate two layouts; segment names must be disjoint.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut segs = self.segments.clone();
        segs.extend(other.segments.iter().cloned());
        Self::new(segs)
    }

    pub fn has_deltas(&self) -> bool {
        self.segments.iter().any(|s| s.deltas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_widths() {
        let a = StreamLayout::acoustic();
        assert_eq!(a.total(), 60 * 3 + 5 * 3 + 3 + 1);
        assert_eq!(a.total(), 199);
        let u = StreamLayout::articulatory(128);
        assert_eq!(u.total(), 384);
        assert_eq!(a.concat(&u).unwrap().total(), 583);
    }

    #[test]
    fn ranges() {
        let a = StreamLayout::acoustic();
        assert_eq!(a.range(MGC), Some(0..180));
        assert_eq!(a.static_range(MGC), Some(0..60));
        assert_eq!(a.range(BAP), Some(180..195));
        assert_eq!(a.range(LF0), Some(195..198));
        assert_eq!(a.range(VUV), Some(198..199));
        assert_eq!(a.range("nope"), None);
        assert_eq!(a.statics().total(), 67);
    }

    #[test]
    fn rejects_duplicates_and_zero_width() {
        assert!(StreamLayout::new(vec![Segment::new("A", 1, false), Segment::new("A", 2, true)]).is_err());
        assert!(StreamLayout::new(vec![Segment::new("A", 0, false)]).is_err());
        assert!(StreamLayout::acoustic().concat(&StreamLayout::acoustic()).is_err());
    }
}
