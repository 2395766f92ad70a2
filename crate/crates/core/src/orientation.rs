//! Projection histograms and the four-way boundary scan that locates the
//! wrist end of the hand.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::BinarySilhouette;

/// Which scanlines a histogram counts over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// One bin per row.
    Row,
    /// One bin per column.
    Column,
}

/// A frame edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Up,
    Down,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Up, Side::Down, Side::Left, Side::Right];

    pub fn opposite(self) -> Side {
        match self {
            Side::Up => Side::Down,
            Side::Down => Side::Up,
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Where this edge ends up after rotating the frame 90 degrees clockwise.
    pub fn rotated_cw(self) -> Side {
        match self {
            Side::Up => Side::Right,
            Side::Right => Side::Down,
            Side::Down => Side::Left,
            Side::Left => Side::Up,
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Side::Up | Side::Down)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Up => "up",
            Side::Down => "down",
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" => Ok(Side::Up),
            "down" => Ok(Side::Down),
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::config(format!("unknown side `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandAxis {
    Vertical,
    Horizontal,
}

/// The wrist edge and the finger edge opposite it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Orientation {
    wrist_side: Side,
}

impl Orientation {
    pub fn from_wrist(wrist_side: Side) -> Self {
        Self { wrist_side }
    }

    pub fn from_finger(finger_side: Side) -> Self {
        Self { wrist_side: finger_side.opposite() }
    }

    pub fn wrist_side(&self) -> Side {
        self.wrist_side
    }

    pub fn finger_side(&self) -> Side {
        self.wrist_side.opposite()
    }

    pub fn hand_axis(&self) -> HandAxis {
        if self.wrist_side.is_vertical() {
            HandAxis::Vertical
        } else {
            HandAxis::Horizontal
        }
    }
}

/// On-pixel counts per row or per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionHistogram {
    pub axis: Axis,
    pub counts: Vec<usize>,
}

impl ProjectionHistogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Index of the first non-zero bin from the low or high end.
    fn first_occupied(&self, from_end: bool) -> Option<usize> {
        if from_end {
            self.counts.iter().rposition(|&c| c > 0)
        } else {
            self.counts.iter().position(|&c| c > 0)
        }
    }
}

pub fn projection_histogram(sil: &BinarySilhouette, axis: Axis) -> ProjectionHistogram {
    let (w, h) = (sil.width(), sil.height());
    let counts = match axis {
        Axis::Row => (0..h).map(|r| sil.bits()[r * w..(r + 1) * w].iter().map(|&b| b as usize).sum()).collect(),
        Axis::Column => {
            let mut counts = vec![0usize; w];
            for row in sil.bits().chunks_exact(w.max(1)) {
                for (c, &b) in counts.iter_mut().zip(row) {
                    *c += b as usize;
                }
            }
            counts
        }
    };
    ProjectionHistogram { axis, counts }
}

/// The first occupied scanline seen from one frame edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeScan {
    /// Frame index of the scanline (row for up/down, column for left/right).
    pub first_index: usize,
    /// On-pixels in that scanline.
    pub magnitude: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanProfile {
    pub up: EdgeScan,
    pub down: EdgeScan,
    pub left: EdgeScan,
    pub right: EdgeScan,
}

impl ScanProfile {
    pub fn get(&self, side: Side) -> EdgeScan {
        match side {
            Side::Up => self.up,
            Side::Down => self.down,
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// True when the maximum magnitude is shared by more than one edge.
    pub fn is_tied(&self) -> bool {
        let max = Side::ALL.iter().map(|&s| self.get(s).magnitude).max().unwrap_or(0);
        Side::ALL.iter().filter(|&&s| self.get(s).magnitude == max).count() > 1
    }
}

/// Ties resolve in this order.
const WRIST_PRIORITY: [Side; 4] = [Side::Down, Side::Up, Side::Left, Side::Right];

/// Scans inward from all four edges; the edge whose first occupied scanline
/// holds the most on-pixels is the wrist.
pub fn four_way_scan(sil: &BinarySilhouette) -> Result<(ScanProfile, Orientation)> {
    let rows = projection_histogram(sil, Axis::Row);
    let cols = projection_histogram(sil, Axis::Column);
    let edge = |h: &ProjectionHistogram, from_end: bool| {
        h.first_occupied(from_end)
            .map(|i| EdgeScan { first_index: i, magnitude: h.counts[i] })
            .ok_or(Error::NoForeground)
    };
    let profile = ScanProfile {
        up: edge(&rows, false)?,
        down: edge(&rows, true)?,
        left: edge(&cols, false)?,
        right: edge(&cols, true)?,
    };
    let mut wrist = WRIST_PRIORITY[0];
    for side in WRIST_PRIORITY {
        if profile.get(side).magnitude > profile.get(wrist).magnitude {
            wrist = side;
        }
    }
    Ok((profile, Orientation::from_wrist(wrist)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::rotate_silhouette_cw;
    use proptest::prelude::*;

    #[test]
    fn diagonal_histograms() {
        let sil = BinarySilhouette::from_fn(3, 3, |r, c| r == c);
        assert_eq!(projection_histogram(&sil, Axis::Row).counts, vec![1, 1, 1]);
        assert_eq!(projection_histogram(&sil, Axis::Column).counts, vec![1, 1, 1]);
    }

    #[test]
    fn all_ones_histograms() {
        let sil = BinarySilhouette::ones(3, 2);
        assert_eq!(projection_histogram(&sil, Axis::Row).counts, vec![3, 3]);
        assert_eq!(projection_histogram(&sil, Axis::Column).counts, vec![2, 2, 2]);
    }

    #[test]
    fn empty_row_has_zero_bin() {
        let sil = BinarySilhouette::from_fn(4, 3, |r, _| r != 1);
        assert_eq!(projection_histogram(&sil, Axis::Row).counts[1], 0);
    }

    /// Forearm block rows 4..=7 x cols 2..=5 plus a finger in column 3, rows 0..=3.
    fn fist_and_finger() -> BinarySilhouette {
        BinarySilhouette::from_fn(8, 8, |r, c| (r >= 4 && (2..=5).contains(&c)) || c == 3)
    }

    #[test]
    fn wrist_down_on_forearm_geometry() {
        let (profile, orient) = four_way_scan(&fist_and_finger()).unwrap();
        assert_eq!(profile.down, EdgeScan { first_index: 7, magnitude: 4 });
        assert_eq!(profile.up, EdgeScan { first_index: 0, magnitude: 1 });
        // Left and right columns also hold 4; the priority rule picks Down.
        assert_eq!(profile.left.magnitude, 4);
        assert_eq!(orient.wrist_side(), Side::Down);
        assert_eq!(orient.finger_side(), Side::Up);
        assert_eq!(orient.hand_axis(), HandAxis::Vertical);
    }

    /// Tie-free variant: forearm 4 wide entering from the bottom, palm 6 wide
    /// with tapering sides, one finger.
    fn tie_free_hand() -> BinarySilhouette {
        BinarySilhouette::from_fn(10, 12, |r, c| {
            let forearm = r >= 9 && (3..=6).contains(&c);
            let palm = (5..=8).contains(&r) && (2..=7).contains(&c) && !((r == 5 || r == 8) && (c == 2 || c == 7));
            let finger = r <= 4 && c == 4;
            forearm || palm || finger
        })
    }

    #[test]
    fn rotation_tracks_wrist_side() {
        let sil = tie_free_hand();
        let (profile, orient) = four_way_scan(&sil).unwrap();
        assert!(!profile.is_tied());
        assert_eq!(orient.wrist_side(), Side::Down);

        let cw = rotate_silhouette_cw(&sil);
        assert_eq!(four_way_scan(&cw).unwrap().1.wrist_side(), Side::Left);
        let half = rotate_silhouette_cw(&cw);
        assert_eq!(four_way_scan(&half).unwrap().1.wrist_side(), Side::Up);
        let ccw = rotate_silhouette_cw(&half);
        assert_eq!(four_way_scan(&ccw).unwrap().1.wrist_side(), Side::Right);
    }

    #[test]
    fn full_square_ties_to_down() {
        let (profile, orient) = four_way_scan(&BinarySilhouette::ones(5, 5)).unwrap();
        assert!(profile.is_tied());
        assert_eq!(orient.wrist_side(), Side::Down);
    }

    #[test]
    fn empty_is_no_foreground() {
        assert!(matches!(four_way_scan(&BinarySilhouette::zeros(3, 3)), Err(Error::NoForeground)));
    }

    #[test]
    fn orientation_invariants() {
        for side in Side::ALL {
            let o = Orientation::from_wrist(side);
            assert_eq!(o.finger_side(), side.opposite());
            assert_eq!(o.hand_axis() == HandAxis::Vertical, side.is_vertical());
            assert_eq!(Orientation::from_finger(o.finger_side()), o);
            assert_eq!(side.rotated_cw().rotated_cw().rotated_cw().rotated_cw(), side);
        }
    }

    proptest! {
        #[test]
        fn histograms_share_total(w in 1usize..10, h in 1usize..10, v in prop::collection::vec(any::<bool>(), 100)) {
            let sil = BinarySilhouette::from_fn(w, h, |r, c| v[r * 10 + c]);
            let rows = projection_histogram(&sil, Axis::Row);
            let cols = projection_histogram(&sil, Axis::Column);
            prop_assert_eq!(rows.len(), h);
            prop_assert_eq!(cols.len(), w);
            prop_assert_eq!(rows.total(), sil.count_on());
            prop_assert_eq!(cols.total(), sil.count_on());
            if let Ok((profile, _)) = four_way_scan(&sil) {
                for side in Side::ALL {
                    prop_assert!(profile.get(side).magnitude >= 1);
                }
            }
        }

        #[test]
        fn untied_scans_rotate(w in 1usize..10, h in 1usize..10, v in prop::collection::vec(any::<bool>(), 100)) {
            let sil = BinarySilhouette::from_fn(w, h, |r, c| v[r * 10 + c]);
            if let Ok((profile, orient)) = four_way_scan(&sil) {
                if !profile.is_tied() {
                    let (_, rotated) = four_way_scan(&rotate_silhouette_cw(&sil)).unwrap();
                    prop_assert_eq!(rotated.wrist_side(), orient.wrist_side().rotated_cw());
                }
            }
        }
    }
}
