use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use robust_bound_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rb_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn squares_round_trip() {
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(rb_density_squares(&mut d), RbStatus::Ok);
        assert!(!d.is_null());

        let mut classes = 0usize;
        let mut grid = RbGrid {
            x0: 0.0,
            y0: 0.0,
            dx: 0.0,
            dy: 0.0,
            nx: 0,
            ny: 0,
        };
        assert_eq!(rb_density_info(d, &mut classes, &mut grid), RbStatus::Ok);
        assert_eq!((classes, grid.nx, grid.ny), (2, 250, 200));

        let mut beta = 0.0;
        assert_eq!(rb_bayes_error(d, &mut beta), RbStatus::Ok);
        assert!((beta - 0.25).abs() < 1e-9);

        let mut r = RbBoundsReport::default();
        assert_eq!(rb_bounds(d, RbNorm::Linf, 0.05, 1e-3, &mut r), RbStatus::Ok);
        assert!((r.zeta_cor2 - 0.5399).abs() < 1e-4);
        assert!((r.zeta_thm3 - 0.5).abs() < 1e-6);
        assert_eq!(last_error(), "");
        rb_density_free(d);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(rb_cor1_lower(0.7, 2, &mut out), RbStatus::InvalidParameter);
        assert!(last_error().contains("beta"), "{}", last_error());
        assert_eq!(
            rb_cor1_lower(0.1, 2, ptr::null_mut()),
            RbStatus::NullPointer
        );
        assert_eq!(rb_bayes_error(ptr::null(), &mut out), RbStatus::NullPointer);
        assert!(last_error().contains("density"));
        assert_eq!(
            rb_effective_radius(RbNorm::Linf, 0.1, 0, &mut out),
            RbStatus::InvalidParameter
        );

        // a grid far too small for the moons leaks mass
        let grid = RbGrid {
            x0: 0.0,
            y0: 0.0,
            dx: 0.1,
            dy: 0.1,
            nx: 4,
            ny: 4,
        };
        let mut d = ptr::null_mut();
        assert_eq!(rb_density_moons(0.2, 64, &grid, &mut d), RbStatus::Numeric);
        assert!(d.is_null());
        assert!(last_error().contains("leak"));
        rb_density_free(ptr::null_mut());
    }
}

#[test]
fn scalar_calculators() {
    unsafe {
        let mut z = 0.0;
        assert_eq!(rb_cor1_lower(0.0524, 10, &mut z), RbStatus::Ok);
        assert!((z - 0.058_222_222_222).abs() < 1e-9);
        let mut r = 0.0;
        assert_eq!(
            rb_effective_radius(RbNorm::Linf, 0.15, 2, &mut r),
            RbStatus::Ok
        );
        assert!((r - 0.3 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert_eq!(
            rb_effective_radius(RbNorm::L2, 0.15, 784, &mut r),
            RbStatus::Ok
        );
        assert_eq!(r, 0.15);
        assert_eq!(
            CStr::from_ptr(rb_version()).to_str().unwrap(),
            env!("CARGO_PKG_VERSION")
        );
    }
}

#[test]
fn mixture_handle() {
    let grid = RbGrid {
        x0: -7.0,
        y0: -6.0,
        dx: 0.05,
        dy: 0.05,
        nx: 280,
        ny: 240,
    };
    let priors = [0.5, 0.5];
    let means = [-1.0, 0.0, 1.0, 0.0];
    let sigmas = [1.0, 1.0];
    unsafe {
        let mut d = ptr::null_mut();
        let st = rb_density_gaussian_mixture(
            2,
            priors.as_ptr(),
            means.as_ptr(),
            sigmas.as_ptr(),
            &grid,
            &mut d,
        );
        assert_eq!(st, RbStatus::Ok, "{}", last_error());
        let mut beta = 0.0;
        assert_eq!(rb_bayes_error(d, &mut beta), RbStatus::Ok);
        assert!((beta - 0.158_655_25).abs() < 1e-3);
        rb_density_free(d);
        assert_eq!(
            rb_density_gaussian_mixture(
                2,
                ptr::null(),
                means.as_ptr(),
                sigmas.as_ptr(),
                &grid,
                &mut d
            ),
            RbStatus::NullPointer
        );
    }
}

fn static_lib() -> Option<PathBuf> {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("librobust_bound_ffi.a");
    lib.exists().then_some(lib)
}

/// Compiles and runs a C program against the generated header and the
/// static library.
#[test]
fn c_program_links_against_header() {
    let Some(lib) = static_lib() else {
        eprintln!("skipping: static library not built next to the test binary");
        return;
    };
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("rb_smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status();
    let Ok(status) = status else {
        eprintln!("skipping: no C compiler `{cc}`");
        return;
    };
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "C program failed: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
