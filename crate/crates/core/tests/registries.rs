use num_complex::Complex64;
use robinc_core::discrepancy::{DiscrepancyEngine, RadiusPolicy};
use robinc_core::point_generation::{GeneratedPoints, GeneratorOptions, GeneratorRegistry, PointGenerator};
use robinc_core::test_functions::{TestFunction, TestFunctionRegistry};
use robinc_core::{CompactSetModel, PointConfiguration, Result};

/// Equally spaced points on the upper half of the unit circle.
struct HalfCircle;

impl PointGenerator for HalfCircle {
    fn name(&self) -> &'static str {
        "half_circle"
    }

    fn generate(&self, _set: &CompactSetModel, n: usize, _opts: &GeneratorOptions) -> Result<GeneratedPoints> {
        let pts = (0..n)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / (n - 1) as f64))
            .collect();
        Ok(GeneratedPoints { config: PointConfiguration::new(pts, "half")?, certificates: None })
    }
}

#[test]
fn custom_generator_is_found_by_name() {
    let mut registry = GeneratorRegistry::with_builtins();
    registry.register(Box::new(HalfCircle));
    assert_eq!(registry.names(), ["fekete", "file", "half_circle", "leja", "roots_of_unity"]);
    let disk = CompactSetModel::unit_disk();
    let out = registry.get("half_circle").unwrap().generate(&disk, 9, &GeneratorOptions::default()).unwrap();
    assert_eq!(out.config.len(), 9);
    assert!(registry.get("sobol").is_err());
}

#[test]
fn clustered_points_have_larger_discrepancy() {
    let disk = CompactSetModel::unit_disk();
    let engine = DiscrepancyEngine::new(&disk).unwrap();
    let phi = TestFunctionRegistry::with_builtins().build("im:1", &disk).unwrap();
    let opts = GeneratorOptions::default();
    let registry = {
        let mut r = GeneratorRegistry::with_builtins();
        r.register(Box::new(HalfCircle));
        r
    };
    let spread = registry.get("roots_of_unity").unwrap().generate(&disk, 32, &opts).unwrap().config;
    let half = registry.get("half_circle").unwrap().generate(&disk, 32, &opts).unwrap().config;
    let a = engine.certificate(phi.as_ref(), &spread, RadiusPolicy::Auto).unwrap();
    let b = engine.certificate(phi.as_ref(), &half, RadiusPolicy::Auto).unwrap();
    assert!(a.lhs < 1e-12);
    // the half-circle configuration has mean Im z = 2/pi in the limit
    assert!(b.lhs > 0.5 && b.holds(1e-6));
    assert!(b.rhs > a.rhs);
}

#[test]
fn unknown_test_function_specs_are_rejected() {
    let disk = CompactSetModel::unit_disk();
    let registry = TestFunctionRegistry::with_builtins();
    for bad in ["re:x", "re:-1", "cos:1", ""] {
        assert!(registry.build(bad, &disk).is_err(), "{bad}");
    }
    // a bare name means the first power
    let z = Complex64::new(0.3, 0.4);
    assert_eq!(registry.build("re", &disk).unwrap().eval(z), registry.build("re:1", &disk).unwrap().eval(z));
    let phi: Box<dyn TestFunction> = registry.build("abs2", &disk).unwrap();
    assert!(phi.eval(Complex64::new(0.5, 0.0)) > 0.0);
}
