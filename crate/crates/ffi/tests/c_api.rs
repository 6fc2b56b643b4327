use std::ffi::{CStr, CString};
use std::ptr;

use sensegan_ffi::*;

fn last_error() -> String {
    let p = sg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generate(n: usize, snr_db: f64, seed: u64) -> *mut SgDataset {
    let mut ds = ptr::null_mut();
    let status = unsafe { sg_dataset_generate(n, snr_db, 1.0, 4, seed, &mut ds) };
    assert_eq!(status, SgStatus::Ok);
    assert!(!ds.is_null());
    ds
}

#[test]
fn dataset_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("d.siqd").to_str().unwrap()).unwrap();
    let ds = generate(20, 5.0, 1);
    unsafe {
        assert_eq!(sg_dataset_len(ds), 20);
        assert_eq!(sg_dataset_feature_len(ds), 80);
        assert_eq!(sg_dataset_write(ds, path.as_ptr()), SgStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(sg_dataset_read(path.as_ptr(), &mut back), SgStatus::Ok);
        let mut a = vec![0.0; 20 * 80];
        let mut b = vec![0.0; 20 * 80];
        assert_eq!(sg_dataset_features(ds, a.as_mut_ptr(), a.len()), SgStatus::Ok);
        assert_eq!(sg_dataset_features(back, b.as_mut_ptr(), b.len()), SgStatus::Ok);
        // stored as f32 on disk
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x as f32 as f64, *y);
        }
        let mut labels = vec![9u8; 20];
        assert_eq!(sg_dataset_labels(back, labels.as_mut_ptr(), 20), SgStatus::Ok);
        assert_eq!(labels, (0..20).map(|i| (i % 2) as u8).collect::<Vec<_>>());
        sg_dataset_free(back);
        sg_dataset_free(ds);
    }
}

#[test]
fn classifier_train_predict_save_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("c.sclf").to_str().unwrap()).unwrap();
    let train = generate(60, 10.0, 2);
    let test = generate(40, 10.0, 3);
    unsafe {
        let mut clf = ptr::null_mut();
        assert_eq!(sg_classifier_train(SgClassifierKind::SvmRbf, train, 0, &mut clf), SgStatus::Ok);
        let mut acc = -1.0;
        assert_eq!(sg_classifier_accuracy(clf, test, &mut acc), SgStatus::Ok);
        assert!((0.0..=1.0).contains(&acc));

        let mut x = vec![0.0; 40 * 80];
        sg_dataset_features(test, x.as_mut_ptr(), x.len());
        let mut pred = vec![0u8; 40];
        assert_eq!(sg_classifier_predict(clf, x.as_ptr(), 40, 80, pred.as_mut_ptr()), SgStatus::Ok);

        assert_eq!(sg_classifier_save(clf, path.as_ptr()), SgStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(sg_classifier_load(path.as_ptr(), &mut loaded), SgStatus::Ok);
        let mut pred2 = vec![0u8; 40];
        sg_classifier_predict(loaded, x.as_ptr(), 40, 80, pred2.as_mut_ptr());
        assert_eq!(pred, pred2);
        sg_classifier_free(loaded);
        sg_classifier_free(clf);
        sg_dataset_free(train);
        sg_dataset_free(test);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(sg_dataset_generate(10, 0.0, -1.0, 4, 0, &mut ds), SgStatus::InvalidInput);
        assert!(ds.is_null());
        assert!(last_error().contains("variance"));

        assert_eq!(sg_dataset_generate(10, 0.0, 1.0, 4, 0, ptr::null_mut()), SgStatus::NullPointer);

        let missing = CString::new("/nonexistent/dir/x.siqd").unwrap();
        assert_eq!(sg_dataset_read(missing.as_ptr(), &mut ds), SgStatus::Io);

        let dir = tempfile::tempdir().unwrap();
        let junk = dir.path().join("junk.siqd");
        std::fs::write(&junk, b"NOPE").unwrap();
        let junk = CString::new(junk.to_str().unwrap()).unwrap();
        assert_eq!(sg_dataset_read(junk.as_ptr(), &mut ds), SgStatus::MalformedFile);

        let good = generate(10, 0.0, 0);
        let mut small = [0.0; 3];
        assert_eq!(sg_dataset_features(good, small.as_mut_ptr(), 3), SgStatus::ShapeMismatch);
        sg_dataset_free(good);

        sg_dataset_free(ptr::null_mut());
        sg_classifier_free(ptr::null_mut());
        assert_eq!(sg_dataset_len(ptr::null()), 0);
    }
}

#[test]
fn predict_rejects_wrong_width() {
    let ds = generate(20, 5.0, 0);
    unsafe {
        let mut clf = ptr::null_mut();
        assert_eq!(sg_classifier_train(SgClassifierKind::RandomForest, ds, 0, &mut clf), SgStatus::Ok);
        let x = [0.0; 6];
        let mut out = [0u8; 2];
        assert_eq!(sg_classifier_predict(clf, x.as_ptr(), 2, 3, out.as_mut_ptr()), SgStatus::ShapeMismatch);
        assert!(last_error().contains("80"));
        sg_classifier_free(clf);
        sg_dataset_free(ds);
    }
}

#[test]
fn augmentation_reports_both_accuracies() {
    let train = generate(20, 10.0, 4);
    let test = generate(20, 10.0, 5);
    let (mut base, mut aug) = (-1.0, -1.0);
    let status =
        unsafe { sg_augment(train, test, SgClassifierKind::RandomForest, 1.0, 5, 7, &mut base, &mut aug) };
    assert_eq!(status, SgStatus::Ok);
    assert!((0.0..=1.0).contains(&base) && (0.0..=1.0).contains(&aug));
    unsafe {
        sg_dataset_free(train);
        sg_dataset_free(test);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
