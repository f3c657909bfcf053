use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sqzvac_ffi::*;

fn params() -> SqzParams {
    SqzParams {
        gamma: 1.0,
        epsilon: 0.25,
        omega_rabi: 1.0,
        delta: 0.2,
        xi_abs: 0.3,
        delta_n: 0.0,
        delta_m: 0.05,
        phase_model: SQZ_PHASE_CONSTANT,
        phi: 0.4,
    }
}

fn model(p: &SqzParams) -> *mut SqzModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sqz_model_new(p, &mut m) }, SqzStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sqz_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn spectra_match_closed_values() {
    let m = model(&params());
    let (mut n, mut a) = (0.0, 0.0);
    assert_eq!(unsafe { sqz_spectra(m, 0.0, &mut n, &mut a) }, SqzStatus::Ok);
    assert_eq!(n, 16.0 / 9.0);
    assert!((a - 20.0 / 9.0).abs() < 1e-15);
    unsafe { sqz_model_free(m) };
}

#[test]
fn results_agree_with_library() {
    let p = params();
    let m = model(&p);
    let mut ts = SqzTimescales::default();
    assert_eq!(unsafe { sqz_timescales(m, &mut ts) }, SqzStatus::Ok);
    let atom = sqzvac::AtomConfig::new(1.0, 0.2).with_xi(0.3);
    let bath = sqzvac::BathConfig::new(1.0, 0.25)
        .with_phase(sqzvac::PhaseModel::Constant(0.4))
        .with_shifts(0.0, 0.05);
    let r = sqzvac::coherence::coherence_time_squeezed(&atom, &bath).unwrap();
    assert_eq!(ts.gamma_decay, r.gamma_decay);
    assert_eq!(ts.tau_c, r.tau_c);

    let mut ss = SqzBlochState::default();
    assert_eq!(unsafe { sqz_steady_state(m, &mut ss) }, SqzStatus::Ok);
    let times = [0.0, 50.0, 200.0];
    let mut traj = [SqzBlochState::default(); 3];
    let ground = SqzBlochState {
        sigma_minus_re: 0.0,
        sigma_minus_im: 0.0,
        sigma_z: -1.0,
    };
    assert_eq!(
        unsafe { sqz_bloch_trajectory(m, ground, times.as_ptr(), 3, traj.as_mut_ptr()) },
        SqzStatus::Ok
    );
    assert_eq!(traj[0].sigma_z, -1.0);
    assert!((traj[2].sigma_z - ss.sigma_z).abs() < 1e-7);
    assert!((traj[2].sigma_minus_re - ss.sigma_minus_re).abs() < 1e-7);

    let mut sus = SqzSustainability::default();
    assert_eq!(unsafe { sqz_sustainability(m, &mut sus) }, SqzStatus::Ok);
    assert!(sus.residual < 1e-12);
    assert_eq!(sus.feasible, i32::from(sus.omega_tilde_required <= 1.0));

    let mut eff = SqzEffectiveParams::default();
    assert_eq!(unsafe { sqz_effective_params(m, &mut eff) }, SqzStatus::Ok);
    assert_eq!(eff.phi, 0.4);
    unsafe { sqz_model_free(m) };
}

#[test]
fn zeno_figures() {
    let mut z = SqzZeno::default();
    assert_eq!(unsafe { sqz_zeno(0.5, 0.1, &mut z) }, SqzStatus::Ok);
    assert_eq!(z.tau_c, 1.0);
    assert!((z.ratio - 20.5).abs() < 1e-12);
    assert!(z.sustainable);
    assert_eq!(unsafe { sqz_zeno(0.5, -1.0, &mut z) }, SqzStatus::InvalidParameter);
}

#[test]
fn errors_are_reported() {
    let mut p = params();
    p.epsilon = 0.5;
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sqz_model_new(&p, &mut m) }, SqzStatus::AmplificationThreshold);
    assert!(m.is_null());
    assert!(last_error().contains("threshold"));

    p.epsilon = 0.1;
    p.phase_model = 7;
    assert_eq!(unsafe { sqz_model_new(&p, &mut m) }, SqzStatus::InvalidParameter);

    p.phase_model = SQZ_PHASE_CONSTANT;
    p.omega_rabi = 0.0;
    p.delta = 0.0;
    let m = model(&p);
    let mut ts = SqzTimescales::default();
    assert_eq!(unsafe { sqz_timescales(m, &mut ts) }, SqzStatus::DegenerateDrive);
    assert_eq!(
        unsafe { sqz_timescales(m, ptr::null_mut()) },
        SqzStatus::DegenerateDrive
    );
    unsafe { sqz_model_free(m) };
    assert_eq!(unsafe { sqz_timescales(ptr::null(), &mut ts) }, SqzStatus::NullPointer);
    unsafe { sqz_model_free(ptr::null_mut()) };
    let name = unsafe { CStr::from_ptr(sqz_status_name(SqzStatus::NullPointer)) };
    assert_eq!(name.to_str().unwrap(), "null pointer");
}

#[test]
fn model_from_config_text() {
    let text = CString::new("gamma = 1\nOmega = 1\nepsilon = 0.25\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sqz_model_from_config(text.as_ptr(), &mut m) }, SqzStatus::Ok);
    let (mut n, mut a) = (0.0, 0.0);
    assert_eq!(unsafe { sqz_spectra(m, 0.0, &mut n, &mut a) }, SqzStatus::Ok);
    assert_eq!(n, 16.0 / 9.0);
    unsafe { sqz_model_free(m) };

    let bad = CString::new("gamma = 1\nOmega = 1\nepsilon = 0.7\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { sqz_model_from_config(bad.as_ptr(), &mut m) },
        SqzStatus::InvalidConfig
    );
    assert!(last_error().starts_with("line 3"));
}

/// Compiles the C example against the generated header and static library.
#[test]
fn c_example_builds_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libsqzvac_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("basic");
    let status = Command::new(&cc)
        .arg(crate_dir.join("examples/basic.c"))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let n0: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("N(0) = "))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(n0, 16.0 / 9.0);
    assert!(stdout.contains("rejected = 1"));
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
        {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
