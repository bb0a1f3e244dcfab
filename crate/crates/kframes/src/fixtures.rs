//! Small frames used throughout the tests, examples and property probes.

use crate::frame::Frame;

/// Three points where 0 fans into the 2-cycle {1,2}:
/// edges 0>1, 0>2, 1>2, 2>1. Its one-generated subframes and quotients
/// exercise the strong/weak definability split.
pub fn fan_cycle_frame() -> Frame {
    Frame::new([0, 1, 2], [(0, 1), (0, 2), (1, 2), (2, 1)]).unwrap()
}

/// The 2-cycle {1,2}: the subframe of [`fan_cycle_frame`] generated by 1.
pub fn two_cycle_frame() -> Frame {
    Frame::new([1, 2], [(1, 2), (2, 1)]).unwrap()
}

/// The quotient of [`fan_cycle_frame`] collapsing the 2-cycle:
/// points {0,1} with edges 0>1, 1>1.
pub fn collapsed_fan_frame() -> Frame {
    Frame::new([0, 1], [(0, 1), (1, 1)]).unwrap()
}

/// Two points with a loop at 0 and a 2-cycle between 0 and 1:
/// edges 0>0, 0>1, 1>0. Its only endo-p-morphism is the identity, which
/// makes its unique map onto the reflexive point a non-regular mono.
pub fn looped_pair_frame() -> Frame {
    Frame::new([0, 1], [(0, 0), (0, 1), (1, 0)]).unwrap()
}

/// The one-point reflexive frame.
pub fn point_frame() -> Frame {
    Frame::reflexive_point()
}

/// Reflexive 2-chain 0>1 with loops, the smallest interesting S4 frame.
pub fn reflexive_chain_frame() -> Frame {
    Frame::new([0, 1], [(0, 0), (0, 1), (1, 1)]).unwrap()
}

/// Directed 3-cycle, a functional frame.
pub fn three_cycle_frame() -> Frame {
    Frame::new([0, 1, 2], [(0, 1), (1, 2), (2, 0)]).unwrap()
}
