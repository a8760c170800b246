//! Worked examples on the reference arrays and small hand-checkable cases.

use dta_core::construct::{
    derive_super_simple, insert_expand, kronecker, mca_optimum, oa_bush, oa_sum, pair_level,
    replicate_cyclic,
};
use dta_core::tooling::{
    catalog_document, catalog_get, export_suite, search_targets, CatalogContent,
};
use dta_core::*;

fn ty(v: &[u32]) -> TypeVector {
    TypeVector::new(v.to_vec()).unwrap()
}

fn table1() -> ArrayDocument {
    catalog_document("table1").unwrap()
}

/// The interaction "current message copied by an MSNET client".
fn msnet_fault(doc: &ArrayDocument) -> Interaction {
    let scope = doc.names.level_by_name(0, "Current").unwrap();
    let client = doc.names.level_by_name(2, "MSNET").unwrap();
    Interaction::new(vec![(0, scope), (2, client)]).unwrap()
}

#[test]
fn msnet_fault_rows() {
    let doc = table1();
    let rows = rho(&doc.array, &msnet_fault(&doc)).unwrap();
    assert_eq!(rows.one_based(), vec![1, 2, 16]);
    assert_eq!(rows.to_string(), "{1,2,16}");
}

#[test]
fn small_row_sets() {
    let a = MixedArray::new(ty(&[2, 2]), vec![vec![0, 0]]).unwrap();
    assert!(rho(&a, &Interaction::new(vec![(0, 1)]).unwrap())
        .unwrap()
        .is_empty());
    let f = MixedArray::full_factorial(ty(&[2, 2]));
    assert_eq!(
        rho(&f, &Interaction::new(vec![(0, 0)]).unwrap())
            .unwrap()
            .len(),
        2
    );
    assert!(rho(&f, &Interaction::new(vec![(2, 0)]).unwrap()).is_err());
    assert!(rho(&f, &Interaction::new(vec![(0, 2)]).unwrap()).is_err());
}

#[test]
fn every_row_covers_some_pair() {
    let a = table1().array;
    let all = interactions(a.types(), 2);
    assert_eq!(all.len(), 45);
    assert_eq!(rho_union(&a, &all).unwrap().len(), 18);
    assert!(rho_union(&a, &[]).unwrap().is_empty());
}

#[test]
fn extension_counts() {
    let f = MixedArray::full_factorial(ty(&[2, 3, 3]));
    let base = Interaction::new(vec![(0, 0), (1, 0)]).unwrap();
    assert_eq!(extensions(&f, &base).unwrap().len(), 3);
    let a = table1().array;
    for base in interactions(a.types(), 2) {
        let free: u32 = (0..4)
            .filter(|&c| !base.pins_column(c))
            .map(|c| a.types().size(c))
            .sum();
        assert_eq!(extensions(&a, &base).unwrap().len(), free as usize);
    }
    let full = Interaction::new(vec![(0, 0), (1, 0), (2, 0)]).unwrap();
    assert!(extensions(&f, &full).is_err());
}

#[test]
fn coverage_of_reference_arrays() {
    assert_eq!(coverage_index(&oa_sum(2, 2).unwrap(), 2).unwrap(), 1);
    assert_eq!(coverage_index(&table1().array, 2).unwrap(), 2);
    let e = catalog_document("example34").unwrap().array;
    assert_eq!(coverage_index(&e, 2).unwrap(), 3);
    assert!(is_d_extendible(&e, 2, 2).unwrap().holds);
    assert!(min_rho_check(&e, 2, 2).unwrap().holds);
    assert!(min_rho_check(&table1().array, 1, 2).unwrap().holds);
    assert!(!min_rho_check(&oa_sum(2, 2).unwrap(), 1, 2).unwrap().holds);
}

#[test]
fn stacked_oa_is_not_detecting() {
    let oa = oa_sum(2, 2).unwrap();
    let stacked = oa.stack(&oa).unwrap();
    assert!(!is_d_extendible(&stacked, 2, 1).unwrap().holds);
    let report = is_detecting(&stacked, 1, 2).unwrap();
    assert!(!report.holds);
    assert!(report.witness.is_some());
    assert!(!is_detecting_brute(&stacked, 1, 2).unwrap().holds);
}

#[test]
fn constant_array_is_not_detecting() {
    let a = MixedArray::new(ty(&[2, 2, 2]), vec![vec![0, 0, 0]; 4]).unwrap();
    assert!(!is_detecting_brute(&a, 1, 2).unwrap().holds);
    assert!(!is_detecting(&a, 1, 2).unwrap().holds);
}

#[test]
fn bounds() {
    assert_eq!(lower_bound(1, 2, &ty(&[2, 3, 3, 3])).unwrap(), 18);
    assert_eq!(lower_bound(2, 2, &ty(&[3, 3, 3, 4, 4])).unwrap(), 48);
    assert_eq!(lower_bound(1, 2, &ty(&[2, 2, 2, 2])).unwrap(), 8);
    assert_eq!(lower_bound(2, 3, &ty(&[5, 5, 5, 5])).unwrap(), 375);
    assert!(lower_bound(2, 2, &ty(&[2, 3, 3])).is_err());
}

#[test]
fn search_constraint_verdicts() {
    assert!(check_search_constraints(&ty(&[3; 7]), 1, 2).is_reject());
    assert!(check_search_constraints(&ty(&[2, 2, 3, 3, 5]), 1, 2).is_reject());
    assert!(matches!(
        check_search_constraints(&ty(&[3; 6]), 1, 2),
        ConstraintVerdict::Pass { .. }
    ));
    assert!(matches!(
        check_search_constraints(&ty(&[2, 4, 5, 6]), 1, 2),
        ConstraintVerdict::Unknown
    ));
    assert!(matches!(
        check_search_constraints(&ty(&[3; 7]), 2, 2),
        ConstraintVerdict::Unknown
    ));
}

#[test]
fn table1_objective_is_zero() {
    assert_eq!(sa_objective(&table1().array).unwrap(), 0);
    let constant = MixedArray::new(ty(&[2, 3, 3, 3]), vec![vec![0; 4]; 18]).unwrap();
    assert!(sa_objective(&constant).unwrap() > 0);
}

#[test]
fn search_below_bound_is_refused() {
    let mut cfg = SearchConfig::new(ty(&[2, 3, 3, 3]));
    cfg.n = Some(17);
    assert!(matches!(sa_search(&cfg), Err(Error::Infeasible(_))));
    cfg.n = None;
    cfg.seed = 3;
    let report = sa_search(&cfg).unwrap();
    assert_eq!(report.outcome, SearchOutcome::Found);
    assert_eq!(report.n, 18);
}

#[test]
fn oa_shapes() {
    let a = oa_sum(2, 3).unwrap();
    assert_eq!((a.n(), a.k()), (9, 3));
    let a = oa_sum(3, 2).unwrap();
    assert_eq!((a.n(), a.k()), (8, 4));
    let b = oa_bush(2, 3).unwrap();
    assert_eq!((b.n(), b.k()), (9, 4));
    let b = oa_bush(3, 5).unwrap();
    assert_eq!((b.n(), b.k()), (125, 6));
    assert!(matches!(oa_bush(2, 4), Err(Error::Unsupported(_))));
}

#[test]
fn optimum_mcas() {
    assert_eq!(mca_optimum(2, &ty(&[2, 3, 3])).unwrap().n(), 9);
    assert_eq!(mca_optimum(3, &ty(&[2, 3, 3, 4])).unwrap().n(), 36);
    let oa = mca_optimum(2, &ty(&[2, 2, 2])).unwrap();
    assert_eq!(oa.n(), 4);
    assert_eq!(dta_core::verify::coverage_range(&oa, 2).unwrap(), (1, 1));
    assert!(mca_optimum(2, &ty(&[2, 3, 3, 3])).is_err());
}

#[test]
fn column_insertion() {
    let a = mca_optimum(2, &ty(&[2, 3, 3])).unwrap();
    let b = MixedArray::new(ty(&[2, 3]), vec![vec![0, 0], vec![1, 1], vec![0, 2]]).unwrap();
    let one = insert_expand(&a, &b, 2, 1).unwrap();
    assert_eq!(one.types(), &ty(&[2, 3, 4]));
    assert_eq!(one.n(), 12);
    assert_eq!(coverage_index(&one, 2).unwrap(), 1);
    let two = insert_expand(&a, &b, 2, 2).unwrap();
    assert_eq!(two.types(), &ty(&[2, 3, 5]));
    assert_eq!(two.n(), 15);
    assert_eq!(coverage_index(&two, 2).unwrap(), 1);
    let wrong = MixedArray::new(ty(&[3, 3]), vec![vec![0, 0], vec![1, 1], vec![2, 2]]).unwrap();
    assert!(insert_expand(&a, &wrong, 2, 1).is_err());
    assert!(insert_expand(&a, &b, 2, 0).is_err());
}

#[test]
fn kronecker_examples() {
    assert_eq!(pair_level(1, 2, 3), 5);
    let oa = oa_sum(2, 2).unwrap();
    let c = kronecker(&oa, &oa).unwrap();
    assert_eq!((c.n(), c.k()), (16, 3));
    assert_eq!(c.types(), &ty(&[4, 4, 4]));
    assert_eq!(coverage_index(&c, 2).unwrap(), 1);
    assert!(kronecker(&oa, &table1().array).is_err());
}

#[test]
fn replication_examples() {
    let a = mca_optimum(2, &ty(&[2, 3, 3])).unwrap();
    let b = MixedArray::new(ty(&[2, 3]), vec![vec![0, 0], vec![1, 1], vec![0, 2]]).unwrap();
    let widened = insert_expand(&a, &b, 2, 1).unwrap();
    assert_eq!(replicate_cyclic(&widened, 1).unwrap(), widened);
    let r = replicate_cyclic(&widened, 2).unwrap();
    assert_eq!(r.n(), 24);
    assert!(is_super_simple(&r, 2).unwrap().holds);
    assert!(is_detecting(&r, 1, 2).unwrap().holds);
    assert!(matches!(
        replicate_cyclic(&widened, 3),
        Err(Error::Infeasible(_))
    ));
}

#[test]
fn super_simple_derivation() {
    let a = derive_super_simple(&oa_sum(3, 2).unwrap(), 2).unwrap();
    assert_eq!((a.n(), a.k()), (8, 3));
    assert!(is_super_simple(&a, 2).unwrap().holds);
    assert_eq!(dta_core::verify::coverage_range(&a, 2).unwrap(), (2, 2));
    let b = derive_super_simple(&oa_bush(3, 5).unwrap(), 2).unwrap();
    assert_eq!((b.n(), b.k()), (50, 5));
    assert!(is_super_simple(&b, 2).unwrap().holds);
    assert_eq!(dta_core::verify::coverage_range(&b, 2).unwrap(), (2, 2));
    assert!(matches!(
        derive_super_simple(&oa_sum(3, 2).unwrap(), 1),
        Err(Error::Infeasible(_))
    ));
}

#[test]
fn table1_localization() {
    let doc = table1();
    let fault = msnet_fault(&doc);
    let y = simulate_outcome(&doc.array, std::slice::from_ref(&fault)).unwrap();
    assert_eq!(y.failing().one_based(), vec![1, 2, 16]);
    let found = locate_faults_verified(&doc.array, 1, 2, &y).unwrap();
    assert_eq!(
        found,
        LocateResult::Identified {
            faults: vec![fault.clone()]
        }
    );
    assert_eq!(
        doc.describe_interaction(&fault),
        "Function scope=Current, Client type=MSNET"
    );

    let none = locate_faults(&doc.array, 1, 2, &OutcomeVector::all_pass(18)).unwrap();
    assert_eq!(none, LocateResult::Identified { faults: vec![] });

    let lone = OutcomeVector::from_failing(&RowSet::from_rows(18, [4]));
    assert!(matches!(
        locate_faults(&doc.array, 1, 2, &lone).unwrap(),
        LocateResult::Inconsistent { .. }
    ));
}

#[test]
fn verified_localization_rejects_non_detecting_arrays() {
    let oa = oa_sum(2, 3).unwrap();
    let y = OutcomeVector::all_pass(oa.n());
    assert!(matches!(
        locate_faults_verified(&oa, 1, 2, &y),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn catalog_entries() {
    let t1 = table1();
    assert_eq!(t1.array.n(), 18);
    assert_eq!(t1.array.types(), &ty(&[2, 3, 3, 3]));
    let e = catalog_document("example34").unwrap();
    assert_eq!(e.array.types(), &ty(&[3, 3, 3, 4, 4]));
    assert!(!is_super_simple(&e.array, 2).unwrap().holds);
    match catalog_get("table2-targets").unwrap().content {
        CatalogContent::Targets { targets } => assert_eq!(targets, search_targets()),
        other => panic!("unexpected {other:?}"),
    }
    assert!(catalog_get("table9").is_err());
}

#[test]
fn export_table1_as_csv() {
    let doc = table1();
    let csv = export_suite(&doc, &doc.names, false).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 19);
    assert_eq!(
        lines[0],
        "Function scope,Server type,Client type,Target content"
    );
    assert_eq!(lines[1], "Current,Share mode,MSNET,Empty");
    assert!(!csv.contains('\r'));

    let numeric = export_suite(&doc, &NameMap::default(), true).unwrap();
    assert_eq!(numeric.lines().nth(1).unwrap(), "0,0,0,0");
    let err = export_suite(&doc, &NameMap::default(), false).unwrap_err();
    assert!(err.to_string().contains("col=1 level=0"), "{err}");
}
