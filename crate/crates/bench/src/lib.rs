//! Shared inputs for the pipeline benchmarks.

use pqa_core::encoding::{circuit_e, compose_boxes, mk_box, SimplePQ};
use pqa_core::syntax::{Color, Program};

/// Named closed programs, each well typed against the bundled signature.
pub fn programs() -> Vec<(&'static str, Program)> {
    let app = |f: Program, a: Program| Program::app(f, a, Color::Functional);
    let composite = Program::force(
        app(app(compose_boxes(), Program::circ(Program::gate("Z"))), Program::circ(Program::gate("H"))),
        Color::Circuit,
    );
    let s = SimplePQ::tensor(SimplePQ::Q, SimplePQ::tensor(SimplePQ::Q, SimplePQ::Q));
    vec![("composite", composite), ("box_q3", mk_box(&s, &s)), ("circuit_e", circuit_e())]
}
