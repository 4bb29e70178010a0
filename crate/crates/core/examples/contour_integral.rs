//! Line integral of the vector potential around enclosing and outside contours.
use abtof::fields::{contour_integral_a, Contour};
use abtof::model::{flux, PhysicalConstants, SolenoidSpec};
use nalgebra::Vector3;

fn main() -> abtof::Result<()> {
    let c = PhysicalConstants::codata2018();
    let spec = SolenoidSpec::bench(5e-3);
    let a = spec.bore_radius;
    let phi = flux(&spec, &c)?.flux;
    let square = |cx: f64, cy: f64, h: f64| {
        Contour::polygon(vec![
            Vector3::new(cx - h, cy - h, 0.0),
            Vector3::new(cx + h, cy - h, 0.0),
            Vector3::new(cx + h, cy + h, 0.0),
            Vector3::new(cx - h, cy + h, 0.0),
        ])
    };
    let cases = [
        ("circle r=3a", Contour::circle(Vector3::zeros(), 3.0 * a)),
        ("square half-width 2a", square(0.0, 0.0, 2.0 * a)),
        ("same square, clockwise", square(0.0, 0.0, 2.0 * a).reversed()),
        ("square off to the side", square(10.0 * a, 0.0, 2.0 * a)),
        ("circle inside the bore", Contour::circle(Vector3::zeros(), 0.5 * a)),
    ];
    println!("Phi = {phi:.10e} Wb");
    for (name, contour) in cases {
        let v = contour_integral_a(&contour, &spec, &c, 1e-10)?;
        println!("{name:<26} {v:>18.10e}  ({:+.3e} Phi)", v / phi);
    }
    Ok(())
}
