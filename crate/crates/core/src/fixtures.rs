//! Small reference instances.

/// Seven agents over nine posts, with ties. Admits several popular
/// matchings, among them [`EX1_M`] and [`EX1_M_PRIME`].
pub const EX1: &str = "\
posts: p1 p2 p3 p4 p5 p6 p7 p8 p9
a1: p1 p2 p3 (p6 p7)
a2: p1 p2 p8
a3: p1 p8
a4: (p2 p3) p1 p8
a5: p3 (p2 p4)
a6: p3 p9 p1
a7: (p4 p5) p1
";

pub const EX1_M: &[(&str, &str)] = &[
    ("a1", "p6"),
    ("a2", "p1"),
    ("a3", "p8"),
    ("a4", "p2"),
    ("a5", "p3"),
    ("a6", "p9"),
    ("a7", "p4"),
];

/// [`EX1_M`] after shifting along `p9 -> p3 -> p4 -> p5`.
pub const EX1_M_PRIME: &[(&str, &str)] = &[
    ("a1", "p6"),
    ("a2", "p1"),
    ("a3", "p8"),
    ("a4", "p2"),
    ("a5", "p4"),
    ("a6", "p3"),
    ("a7", "p5"),
];

/// Two agents who both want only `p1`. Either single pair is popular.
pub const TWO_AGENTS_ONE_POST: &str = "a1: p1\na2: p1\n";

/// Three agents with the same strict list over three posts: no popular
/// matching exists.
pub const NO_POPULAR: &str = "a1: p1 p2 p3\na2: p1 p2 p3\na3: p1 p2 p3\n";
