//! Loop-by-loop force from the moving charge's field against the closed form.
use abtof::force::{boyer_force_y, loop_force_quadrature, truncation_fraction, LoopStack};
use abtof::model::{electron_speed_from_energy, PhysicalConstants};
use nalgebra::Vector3;

fn main() -> abtof::Result<()> {
    let c = PhysicalConstants::codata2018();
    let a = 1.25e-3;
    let v = electron_speed_from_energy(40.0, &c)?;
    let e = Vector3::new(10.0 * a, 10.0 * a, 0.0);
    println!("{:>6} {:>16} {:>16} {:>11} {:>11}", "L/a", "quadrature [N]", "closed form [N]", "rel err", "end loss");
    for l in [25.0, 50.0, 100.0, 200.0, 400.0] {
        let stack = LoopStack::with_length(a, l * a, 3000.0, 1e-3)?;
        let q = loop_force_quadrature(&stack, &e, v, &c, 1e-9)?;
        let f = boyer_force_y(stack.equivalent_flux(&c), (e.x, e.y), v, &c)?;
        let rho = e.xy().norm();
        println!(
            "{l:>6} {:>16.8e} {f:>16.8e} {:>11.3e} {:>11.3e}",
            q.force.y,
            (q.force.y / f - 1.0).abs(),
            truncation_fraction(stack.length(), rho)
        );
    }
    Ok(())
}
