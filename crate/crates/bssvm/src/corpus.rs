//! A small corpus of machine descriptions used by the test suites, the CLI
//! examples, and the fuzz seed corpus.

/// Copies the input word back out unchanged.
pub const IDENTITY: &str = "\
machine identity over Q
node start: input -> done
node done: output
";

/// Halts with the input when it is nonnegative, spins forever otherwise.
/// Its halting set is the half-line x1 >= 0.
pub const SIGN_BRANCH: &str = "\
machine sign_branch over Q
node start: input -> test
node test: branch x1 >= 0 ? done : spin
node spin: shift left -> spin
node done: output [x1]
";

/// Newton iteration for sqrt(2) with halting threshold |x^2 - 2| <= 1/1000.
pub const NEWTON_SQRT2: &str = "\
machine newton_sqrt2 over Q
node start: input -> test
node test: compute x2 := x1*x1-2 -> hiq
node hiq: branch x2-1/1000 >= 0 ? iter : loq
node loq: branch x2+1/1000 >= 0 ? done : iter
node iter: compute x1 := (x1+2/x1)/2 -> test
node done: output [x1]
";

/// Newton iteration for sqrt(2) with threshold 1/10^12.
pub const NEWTON_SQRT2_HI: &str = "\
machine newton_sqrt2_hi over Q
node start: input -> test
node test: compute x2 := x1*x1-2 -> hiq
node hiq: branch x2-1/1000000000000 >= 0 ? iter : loq
node loq: branch x2+1/1000000000000 >= 0 ? done : iter
node iter: compute x1 := (x1+2/x1)/2 -> test
node done: output [x1]
";

/// One Newton step followed by the threshold test: halts when the single
/// iterate already satisfies |y^2 - 2| <= 1/1000, spins otherwise.
pub const NEWTON_GATE: &str = "\
machine newton_gate over Q
node start: input -> stepn
node stepn: compute x2 := (x1+2/x1)/2 -> tval
node tval: compute x3 := x2*x2-2 -> hiq
node hiq: branch x3-1/1000 >= 0 ? spin : loq
node loq: branch x3+1/1000 >= 0 ? done : spin
node spin: shift left -> spin
node done: output [x2]
";

/// Unbounded escape iteration z <- z^2 + c over the plane; halts when
/// |z|^2 >= 4, diverging exactly on the non-escaping parameters.
pub const MANDELBROT: &str = "\
machine mandelbrot over Q
node start: input -> iterz
node iterz: compute x3 := x3*x3-x4*x4+x1, x4 := 2*x3*x4+x2 -> esc
node esc: branch x3*x3+x4*x4-4 >= 0 ? done : iterz
node done: output [x3, x4]
";

/// Escape test bounded to 5 iterations: halts if |z_k|^2 >= 4 for some
/// k <= 5, spins forever otherwise.
pub const MANDELBROT_GATE5: &str = "\
machine mandelbrot_gate5 over Q
node start: input -> init
node init: compute x5 := 5 -> iterz
node iterz: compute x3 := x3*x3-x4*x4+x1, x4 := 2*x3*x4+x2 -> esc
node esc: branch x3*x3+x4*x4-4 >= 0 ? done : dec
node dec: compute x5 := x5-1 -> more
node more: branch x5-1 >= 0 ? iterz : spin
node spin: shift left -> spin
node done: output [x3, x4]
";

/// Equational machine: halts exactly on the algebraic set x1 = 0.
pub const EQUATIONAL_ZERO: &str = "\
machine equational_zero over Q equational
node start: input -> test
node test: branch x1 = 0 ? done : spin
node spin: shift left -> spin
node done: output []
";

/// Equational shift loop scanning the input word for a zero entry; always
/// halts within 4 steps per entry. Its halting cells are the algebraic sets
/// {x1 != 0, ..., x_{i-1} != 0, x_i = 0} plus the everything-nonzero cell.
pub const ZERO_SCAN: &str = "\
machine zero_scan over Q equational
node start: input -> ctr
node ctr: branch x0 = 0 ? none : peek
node peek: branch x1 = 0 ? found : step
node step: compute x1 := x0-1 -> slide
node slide: shift left -> ctr
node found: output [x1]
node none: output []
";

/// Absolute value via the canonical two-cell sign split.
pub const ABS: &str = "\
machine abs over Q
node start: input -> test
node test: branch x1 >= 0 ? pos : neg
node pos: output [x1]
node neg: compute x1 := 0-x1 -> negout
node negout: output [x1]
";

/// Subtraction-only Euclid over the integers; defined for inputs a, b >= 1.
pub const GCD: &str = "\
machine gcd over Z
node start: input -> cmp1
node cmp1: branch x1-x2 >= 0 ? cmp2 : sub2
node cmp2: branch x2-x1 >= 0 ? done : sub1
node sub1: compute x1 := x1-x2 -> cmp1
node sub2: compute x2 := x2-x1 -> cmp1
node done: output [x1]
";

/// Multiplies the input by sqrt(2); exercises an algebraic machine parameter.
pub const SCALE_SQRT2: &str = "\
machine scale_sqrt2 over Ralg
param r2 = alg(x^2-2, 1, 2)
node start: input -> mul
node mul: compute x1 := r2*x1 -> done
node done: output [x1]
";

/// Every corpus machine, by name.
pub const ALL: &[(&str, &str)] = &[
    ("identity", IDENTITY),
    ("sign_branch", SIGN_BRANCH),
    ("newton_sqrt2", NEWTON_SQRT2),
    ("newton_sqrt2_hi", NEWTON_SQRT2_HI),
    ("newton_gate", NEWTON_GATE),
    ("mandelbrot", MANDELBROT),
    ("mandelbrot_gate5", MANDELBROT_GATE5),
    ("equational_zero", EQUATIONAL_ZERO),
    ("zero_scan", ZERO_SCAN),
    ("abs", ABS),
    ("gcd", GCD),
    ("scale_sqrt2", SCALE_SQRT2),
];

/// The cell-enumeration corpus: machines whose path trees stay tractable at
/// depth 200, paired with their input dimension. Unbounded iterated maps
/// (the looping Newton and the full escape machine) are excluded because
/// their path conditions grow as degree-2^k polynomials.
pub const CELL_CORPUS: &[(&str, &str, usize)] = &[
    ("sign_branch", SIGN_BRANCH, 1),
    ("newton_gate", NEWTON_GATE, 1),
    ("mandelbrot_gate5", MANDELBROT_GATE5, 2),
    ("equational_zero", EQUATIONAL_ZERO, 1),
    ("zero_scan", ZERO_SCAN, 3),
    ("abs", ABS, 1),
];
