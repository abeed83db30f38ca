//! Registry of every check the verifier knows about.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// passes when the largest absolute residual is at most the tolerance
    Abs,
    /// passes when the relative residual is at most the tolerance
    Rel,
    /// negative control: passes when the residual reaches the floor
    Floor,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckSpec {
    pub id: &'static str,
    pub suite: &'static str,
    pub equation: &'static str,
    pub section: &'static str,
    pub formula: &'static str,
    pub kind: Kind,
    pub tolerance: f64,
    pub min_order: usize,
}

const fn check(
    id: &'static str,
    suite: &'static str,
    equation: &'static str,
    section: &'static str,
    formula: &'static str,
    kind: Kind,
    tolerance: f64,
    min_order: usize,
) -> CheckSpec {
    CheckSpec {
        id,
        suite,
        equation,
        section,
        formula,
        kind,
        tolerance,
        min_order,
    }
}

use Kind::*;

pub const SUITES: [&str; 7] = [
    "tilde-algebra",
    "lie-calculus",
    "commutator",
    "kinematic-lagrangian",
    "emt-onshell",
    "variational",
    "gauge",
];

pub const CHECKS: &[CheckSpec] = &[
    // tilde-algebra
    check("tilde-delta", "tilde-algebra", "til", "§2", "max |δ̃^a_b{}^c_d|", Abs, 1e-14, 0),
    check("tilde-metric", "tilde-algebra", "til", "§2", "g̃_{ab}{}^c_d + g_{db}δ^c_a + g_{ad}δ^c_b", Abs, 1e-14, 0),
    check("tilde-scalar", "tilde-algebra", "til", "§2", "max |φ̃^a_b|", Abs, 1e-14, 0),
    check("tilde-levi-civita", "tilde-algebra", "vol", "§2", "ε̃_{a…}{}^b_c + ε_{a…}δ^b_c", Abs, 1e-14, 0),
    check("tilde-brute", "tilde-algebra", "til", "§2", "T̃ minus the explicit sum of single-index replacements", Abs, 1e-14, 0),
    check("tilde-leibniz", "tilde-algebra", "til", "§2", "(T⊗S)~ − T̃⊗S − T⊗S̃ (tilde slots last)", Abs, 1e-14, 0),
    check("tilde-trace", "tilde-algebra", "til", "§2", "T̃^{…a}_{…a} − (p − q)T", Abs, 1e-13, 0),
    // lie-calculus
    check("lie-metric", "lie-calculus", "pp", "§2", "£_ξg_{ab} − ∇_aξ_b − ∇_bξ_a", Abs, 1e-10, 2),
    check("lie-volume", "lie-calculus", "vol", "§2", "∂_a(√|g|ξ^a) − √|g|∇_aξ^a and ½√|g|g^{ab}£_ξg_{ab} − √|g|∇_aξ^a", Abs, 1e-10, 2),
    check("lie-forms", "lie-calculus", "ld", "§2", "(∂_aT ξ^a − T̃^a_b ∂_aξ^b) − (∇_aT ξ^a − T̃^a_b ∇_aξ^b)", Abs, 1e-12, 2),
    // commutator
    check("curvature-commutator", "commutator", "a5", "§2", "(∇_a∇_b − ∇_b∇_a)T − R^d_{cab} T̃^c_d, ranks up to (1,1)", Abs, 1e-9, 2),
    check("tilde-derivative", "commutator", "a7", "§2", "(∇_eT)~^a_b − ∇_e(T̃^a_b) + δ^a_e ∇_bT", Abs, 1e-10, 2),
    check("c-equals-cri", "commutator", "cri", "§2", "R^c_{bda}ξ^d + ∇_a∇_bξ^c − ½g^{cd}(∇_a£g_{bd} + ∇_b£g_{ad} − ∇_d£g_{ab})", Abs, 1e-9, 2),
    check("c-symmetric", "commutator", "c", "§2", "C_ξ^c_{ba} − C_ξ^c_{ab}", Abs, 1e-9, 2),
    check("lie-nabla-from-c", "commutator", "a15", "§2", "£_ξ∇T − ∇£_ξT − C_ξ^c_{ba} T̃^b_c", Abs, 1e-9, 2),
    check("lie-nabla-metric", "commutator", "a15", "§2", "£_ξ∇g − ∇£_ξg + ∇(∇ξ + ∇ξᵀ)", Abs, 1e-9, 2),
    check("killing-commute", "commutator", "a15", "§2", "max(|C_ξ|, |£_ξ∇T − ∇£_ξT|) for Killing ξ", Abs, 1e-10, 2),
    // kinematic-lagrangian
    check("lagrangian-scalar", "kinematic-lagrangian", "Lie", "§3", "∂L/∂(∇ψ)·£∇ψ + ∂L/∂ψ·£ψ + ∂L/∂g·£g − ξ^a∇_aL", Abs, 1e-9, 2),
    check("broken-lagrangian", "kinematic-lagrangian", "Lie", "§3", "same residual for L = −½(∇φ)² + x⁰φ²", Floor, 1e-3, 2),
    check("theta-antisymmetry", "kinematic-lagrangian", "th", "§3", "Θ^{abc} + Θ^{bac}", Abs, 1e-12, 2),
    check("theta-tail-symmetry", "kinematic-lagrangian", "th", "§3", "b↔c asymmetry of ½(Q^{bac} − Q^{bca} + Q^{cab} − Q^{cba})", Abs, 1e-12, 2),
    check("tm-symmetry", "kinematic-lagrangian", "tm", "§3", "T_M^{ab} − T_M^{ba}", Abs, 1e-12, 2),
    check("tilde-lagrangian", "kinematic-lagrangian", "ee", "§3", "2∂L/∂g_{ab} − ∂L/∂(∇_cψ)·(∇_cψ)~^{ab} − ∂L/∂ψ·ψ̃^{ab}", Abs, 1e-10, 2),
    // emt-onshell
    check("eom-gate", "emt-onshell", "eqm", "§3", "∇_a ∂L/∂(∇_aψ) − ∂L/∂ψ", Abs, 1e-7, 2),
    check("div-tb", "emt-onshell", "tb", "§3", "∇_aT_B^{ab}", Abs, 1e-8, 3),
    check("div-tm", "emt-onshell", "tm", "§3", "∇_aT_M^{ab}", Abs, 1e-8, 3),
    check("tb-equals-tm", "emt-onshell", "tb", "§3(iv)", "T_B^{ab} − T_M^{ab}, T_B = T_C − ∇_cΘ^{cab}", Abs, 1e-8, 3),
    check("div-tc-flat", "emt-onshell", "qq", "§3", "∇_aT_C^{ab} on a flat metric", Abs, 1e-8, 3),
    check("canonical-divergence", "emt-onshell", "707", "§3", "∇_aT_C^{ab} − ∂L/∂(∇_aψ)·R^b_{adc}ψ̃^{cd}", Abs, 1e-8, 3),
    check("canonical-divergence-nonzero", "emt-onshell", "707", "§3", "min(max|∇_aT_C^{ab}|, max|∂L/∂(∇_aψ)·R^b_{adc}ψ̃^{cd}|), tensor content on a curved metric", Floor, 1e-6, 3),
    check("canonical-divergence-scalar", "emt-onshell", "707", "§3", "max(|∇_aT_C^{ab}|, |∂L/∂(∇_aφ)·R^b_{adc}φ̃^{cd}|) for scalar content", Abs, 1e-9, 3),
    check("noether-current", "emt-onshell", "Noether", "§3(i)", "∇_a(T_B^{ab}ξ_b), Killing ξ", Abs, 1e-8, 3),
    check("alt-current", "emt-onshell", "1501", "§3", "∇_a(T_C^{ab}ξ_b + Θ^{cab}∇_cξ_b), Killing ξ", Abs, 1e-8, 3),
    check("lie-current", "emt-onshell", "778", "§3", "∇_a(∂L/∂(∇_aψ)·£_ξψ − Lξ^a), Killing ξ", Abs, 1e-8, 3),
    check("difference-current", "emt-onshell", "1500", "§3", "∇_a(∇_cΘ^{cab}ξ_b + Θ^{cab}∇_cξ_b)", Abs, 1e-8, 3),
    check("parallel-current", "emt-onshell", "qq", "§3", "∇_a(T_C^{ab}ξ_b), parallel ξ", Abs, 1e-9, 3),
    check("identity-ee", "emt-onshell", "ee", "§3", "2∂L/∂g_{ab} − ∇_c(∂L/∂(∇_cψ)·ψ̃^{ab}) + ∂L/∂(∇_aψ)·∇^bψ", Abs, 1e-9, 3),
    check("ee-symmetry", "emt-onshell", "ee", "§3", "a↔b asymmetry of ∇_c(∂L/∂(∇_cψ)·ψ̃^{ab}) − ∂L/∂(∇_aψ)·∇^bψ", Abs, 1e-9, 3),
    check("ee-scalar", "emt-onshell", "ee", "§3", "2∂L/∂g_{ab} + ∂L/∂(∂_aφ)∂^bφ", Abs, 1e-9, 3),
    check("ee-maxwell", "emt-onshell", "ee", "§3", "2∂L/∂g_{ab} + ∂L/∂(∇_aA_c)F^b_c", Abs, 1e-9, 3),
    check("master-identity", "emt-onshell", "magic", "§3", "∇_a(T_B^{ab}ξ_b) − ½T_M^{ab}£_ξg_{ab}", Abs, 1e-8, 3),
    // variational
    check("variational-tm", "variational", "TM", "§3", "|dS/dε − ½∫T_M^{ab}h_{ab}√|g|| / max(|dS/dε|, |½∫T_M h√|g||)", Rel, 1e-6, 0),
    check("variational-pointwise", "variational", "304", "§3", "δ(L√|g|) − ½T_M^{ab}h_{ab}√|g| − ½∇_c((Q + Θ)^{cab}h_{ab})√|g|", Abs, 1e-10, 0),
    // gauge
    check("gauge-tm", "gauge", "tm", "§3", "T_M[A + ∇χ] − T_M[A]", Abs, 1e-9, 2),
    check("gauge-tb", "gauge", "tb", "§3", "T_B[A + ∇χ] − T_B[A]", Abs, 1e-9, 2),
    check("gauge-tc-control", "gauge", "tc", "§3", "T_C[A + ∇χ] − T_C[A]", Floor, 1e-4, 2),
];

pub fn find(id: &str) -> Option<&'static CheckSpec> {
    CHECKS.iter().find(|c| c.id == id)
}

pub fn in_suite(suite: &str) -> impl Iterator<Item = &'static CheckSpec> + '_ {
    CHECKS.iter().filter(move |c| c.suite == suite)
}

/// Plain-text description used by `explain`.
pub fn explain(spec: &CheckSpec) -> String {
    let kind = match spec.kind {
        Abs => "absolute bound",
        Rel => "relative bound",
        Floor => "negative control, floor",
    };
    format!(
        "{}\nsuite: {}\nequation: {} ({})\nformula: {}\ndefault tolerance: {:e} ({})\nminimum jet order: {}\n",
        spec.id, spec.suite, spec.equation, spec.section, spec.formula, spec.tolerance, kind, spec.min_order
    )
}
