#pragma once

// Generated by oracle.py; do not edit.
namespace oracle {
inline constexpr double stopping_power_62 = 10.701938524231649989;
inline constexpr double sqrt_t_e1_k1e3 = 0.50675964870054942346;
inline constexpr double moliere_eps_19_3 = 0.0049883690876195399328;
inline constexpr double moliere_eps_96_7 = 0.024993538382010855518;
inline constexpr double ds_de_62 = -0.13291117199448984663;
inline constexpr double dsqrt_t_de_10_k1e3 = 0.0075945118967372105124;
inline constexpr double d2sqrt_t_de2_10_k1e3 = -0.00067211430286124313035;
inline constexpr double ds_dalpha_10 = -19823.547327610593858;
inline constexpr double dsqrt_t_dalpha_10 = -150.08916791970771764;
inline constexpr double d2sqrt_t_dalpha_de_10 = -1.7260254310766387528;
inline constexpr double ds_dp_10 = -125.05932740335198169;
inline constexpr double dsqrt_t_dp_10 = -0.94685628562674734664;
inline constexpr double d2sqrt_t_dp_de_10 = -0.043908464227043292367;
inline constexpr double ds_dkappa_10 = 0.0;
inline constexpr double dsqrt_t_dkappa_10 = 330.1961694233569788;
inline constexpr double d2sqrt_t_dkappa_de_10 = 3.7972559483686052562;
inline constexpr double calibrated_kappa = 0.000039978255095639630517;
inline constexpr double calibrated_kappa_propagated = 0.00054677642322098719899;
inline constexpr double csda_range_62_emin0 = 3.273075107678726716;
inline constexpr double csda_range_62_emin4 = 3.2474851913738892504;
inline constexpr double dT_dalpha = 1476.129632442676932;
inline constexpr double dT_dp = 13.472945665061112484;
inline constexpr double det_energy_t005 = 61.463111950360177934;
inline constexpr double det_energy_midpoint = 41.910056432715153511;
inline constexpr double det_energy_sens_alpha_t005 = 244.86018677631362702;
inline constexpr double det_energy_sens_p_t005 = 2.5252654203877132872;
inline constexpr double det_energy_sens_alpha_t2 = 14671.539847739299626;
inline constexpr double det_energy_sens_p_t2 = 144.17428010237942075;
inline constexpr double mollifier_4_3 = 0.76852478349901764293;
inline constexpr double mollifier_de_4_3 = 0.71157776258722280875;
}  // namespace oracle
