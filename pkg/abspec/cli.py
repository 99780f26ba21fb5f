"""Command line front end of abspec.

Subcommands: oracle, solve, sweep, profile and mesh. Every artifact a
command writes goes to its output directory, whose path is printed last.
"""

import argparse
import math
import sys
from dataclasses import fields

import numpy as np

from abspec.almgren import frequency_curve, inequality_checks
from abspec.assembly import assemble, dump_matrix
from abspec.asymptotics import (MIN_FIT_SAMPLES, evaluate_invariants,
                                limit_constant, pole_diagnostics,
                                pole_term_ratio, pole_sweep, reference_state,
                                solve_harmonic_extension, solve_limit_profile)
from abspec.eigensolve import (check_simplicity, dump_eigenpair,
                               m_orthogonality_defect, solve_lowest)
from abspec.gauge import PoleConfig
from abspec.geometry import (make_disk_domain, mesh_domain, mesh_quality,
                             read_polygon_file, write_mesh)
from abspec.oracle import disk_spectrum
from abspec.utils.common import (FLOAT_FORMAT, LOG_FMT, LOG_LEVEL_MAIN, Logger,
                                 format_float, set_log_level, write_csv,
                                 write_dat, write_lines)
from abspec.utils.config import Config, RunConfig
from abspec.utils.errors import (AbspecError, RateFitError, SimplicityError,
                                 WindowError)

logger = Logger().getLogger('ABSPEC_CLI', LOG_LEVEL_MAIN, LOG_FMT)

ALMGREN_RADII = 24
ALMGREN_MIN_RADIUS = 0.05
ALMGREN_MAX_RADIUS = 0.5


#--------------------------------------ARGUMENTS DEFINITION--------------------------------------#

def _common_arguments():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--config',
        '-c',
        type=str,
        default=None,
        dest='config',
        help='key = value configuration file (flags override its values).')
    common.add_argument(
        '--output',
        '-o',
        type=str,
        default=None,
        dest='output',
        help='Output directory (a numbered abspec-<command>-res<N> folder is created when omitted).')
    common.add_argument(
        '--log-level',
        '-log',
        type=str,
        default=None,
        dest='log_level',
        help='Logging level of every abspec logger (DEBUG, INFO, WARNING...).')
    common.add_argument(
        '--seed',
        '-sd',
        type=int,
        default=None,
        dest='seed',
        help='Seed of the eigensolver starting block.')
    common.add_argument(
        '--jobs',
        '-j',
        type=int,
        default=None,
        dest='jobs',
        help='Number of sweep samples solved concurrently.')
    common.add_argument(
        '--emit-plots',
        action='store_const',
        const=True,
        default=None,
        dest='emit_plots',
        help='Also write two-column .dat files ready for gnuplot.')
    common.add_argument(
        '--alpha',
        '-a',
        type=float,
        default=None,
        dest='alpha',
        help='Circulation, in (0,1) and different from 1/2.')
    return common


def _domain_arguments(parser):
    parser.add_argument('--radius', type=float, default=None, dest='radius',
                        help='Disk radius (ignored with --polygon).')
    parser.add_argument('--n-boundary', type=int, default=None,
                        dest='n_boundary',
                        help='Number of boundary vertices of the disk.')
    parser.add_argument('--polygon', type=str, default=None, dest='polygon',
                        help='File with one "x y" polygon vertex per line.')
    parser.add_argument('--rescale', action='store_const', const=True,
                        default=None, dest='rescale',
                        help='Scale the polygon so that D_2 lies inside.')
    parser.add_argument('--h-max', type=float, default=None, dest='h_max',
                        help='Coarse mesh size.')
    parser.add_argument('--grading', type=str, default=None, dest='grading',
                        help='Grading exponent toward the pole ("auto" derives it from alpha).')
    parser.add_argument('--h-min-floor', type=float, default=None,
                        dest='h_min_floor',
                        help='Distance floor of the grading law.')


def _solver_arguments(parser):
    parser.add_argument('--n0', type=int, default=None, dest='n0',
                        help='Index of the studied eigenvalue (1-based).')
    parser.add_argument('--tol', type=float, default=None, dest='tol',
                        help='Relative residual target of the eigensolver.')
    parser.add_argument('--preconditioner', type=str, default=None,
                        dest='preconditioner', help="'ilu' or 'jacobi'.")
    parser.add_argument('--dense-limit', type=int, default=None,
                        dest='dense_limit',
                        help='Largest dimension solved with a dense eigensolver.')
    parser.add_argument('--quadrature-order', type=int, default=None,
                        dest='quadrature_order',
                        help='Quadrature order away from the pole (>= 4).')
    parser.add_argument('--Q', type=int, default=None, dest='Q',
                        help='Samples per trace circle (power of two >= 64).')
    parser.add_argument('--J', type=int, default=None, dest='J',
                        help='Fourier mode window |j| <= J.')
    parser.add_argument('--beta-radii', type=str, default=None,
                        dest='beta_radii',
                        help='Comma separated radii R of the beta formula.')


def _profile_arguments(parser):
    parser.add_argument('--k', type=int, default=None, dest='k',
                        help='Far-field mode of the limit profile.')
    parser.add_argument('--S', type=float, default=None, dest='profile_S',
                        help='Truncation radius of the limit profile (>= 8).')
    parser.add_argument('--profile-h-max', type=float, default=None,
                        dest='profile_h_max',
                        help='Coarse mesh size of the limit profile mesh.')
    parser.add_argument('--limit-radii', type=str, default=None,
                        dest='limit_radii',
                        help='Comma separated radii R of F(R).')
    parser.add_argument('--verify-doubling', action='store_const', const=True,
                        default=None, dest='verify_doubling',
                        help='Check the profile against a solve on D_2S.')


def build_parser():
    """Argument parser with one subparser per command."""
    common = _common_arguments()
    parser = argparse.ArgumentParser(
        prog='abspec',
        description='Aharonov-Bohm eigenvalue laboratory.')
    sub = parser.add_subparsers(dest='command', required=True)

    oracle = sub.add_parser('oracle', parents=[common],
                            help='Exact eigenvalues of the unit disk with central pole.')
    oracle.add_argument('--count', '-n', type=int, default=None, dest='count',
                        help='Number of eigenvalues.')
    oracle.set_defaults(handler=cmd_oracle)

    solve = sub.add_parser('solve', parents=[common],
                           help='One eigenvalue problem for a fixed pole.')
    _domain_arguments(solve)
    _solver_arguments(solve)
    solve.add_argument('--pole', type=float, nargs=2, default=None,
                       dest='pole', help='Pole coordinates.')
    solve.add_argument('--count', '-n', type=int, default=None, dest='count',
                       help='Number of eigenpairs to compute.')
    solve.set_defaults(handler=cmd_solve)

    sweep = sub.add_parser('sweep', parents=[common],
                           help='Pole sweep along a direction with all asymptotic checks.')
    _domain_arguments(sweep)
    _solver_arguments(sweep)
    _profile_arguments(sweep)
    sweep.add_argument('--direction', type=float, default=None,
                       dest='direction', help='Angle of the sweep direction.')
    sweep.add_argument('--a-list', type=str, default=None, dest='a_list',
                       help='Comma separated, strictly decreasing |a| values.')
    sweep.add_argument('--K', type=float, default=None, dest='K',
                       help='Scaling constant of H(phi_a, K|a|).')
    sweep.add_argument('--annulus', type=str, default=None, dest='annulus',
                       help='Blow-up annulus "r1,r2".')
    sweep.set_defaults(handler=cmd_sweep)

    profile = sub.add_parser('profile', parents=[common],
                             help='Limit profile and its convergence constant.')
    _profile_arguments(profile)
    profile.add_argument('--K', type=float, default=None, dest='K',
                         help='Radius of the H ratio limit.')
    profile.set_defaults(handler=cmd_profile)

    mesh = sub.add_parser('mesh', parents=[common],
                          help='Export a graded mesh in the abmesh 1 format.')
    _domain_arguments(mesh)
    mesh.add_argument('--pole', type=float, nargs=2, default=None,
                      dest='pole', help='Pole coordinates.')
    mesh.add_argument('--matrices', action='store_true', dest='matrices',
                      help='Also dump the stiffness and mass matrices.')
    mesh.set_defaults(handler=cmd_mesh)
    return parser


def run_config(args):
    """File values (when --config is given) overridden by flags, validated."""
    run = RunConfig.from_file(args.config) if args.config else RunConfig()
    known = {f.name for f in fields(RunConfig)}
    overrides = {key: value for key, value in vars(args).items()
                 if key in known}
    return run.merged(overrides).validate()


def build_domain(run):
    if run.polygon:
        return read_polygon_file(run.polygon, rescale_to_disk2=run.rescale)
    return make_disk_domain(run.radius, run.n_boundary)


#-------------------------------------------COMMANDS--------------------------------------------#

def cmd_oracle(args, run):
    """Print the oracle table as CSV."""
    table = disk_spectrum(run.alpha, run.count)
    table.to_frame().to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT,
                            lineterminator='\n')
    return 0


def _pole_config(run):
    if run.pole == (0.0, 0.0):
        return PoleConfig(run.alpha, run.pole, run.direction)
    return PoleConfig(run.alpha, run.pole)


def _almgren_radii(mesh, cfg):
    room = mesh.domain.distance_to_boundary(np.zeros(2))
    lo = max(ALMGREN_MIN_RADIUS, 2.0 * cfg.abs_pole)
    hi = min(ALMGREN_MAX_RADIUS, 0.9 * room)
    if lo >= hi:
        return None
    return np.geomspace(lo, hi, ALMGREN_RADII)


def _verdict(passed):
    return 'PASS' if passed else 'FAIL'


def cmd_solve(args, run):
    """Eigenpairs, beta table and Almgren curve for one pole."""
    config = Config('solve', run.output)
    domain = build_domain(run)
    cfg = _pole_config(run)
    mesh = mesh_domain(domain, cfg.pole, run.h_max, run.grading_exponent,
                       run.h_min_floor)
    system = assemble(mesh, cfg, run.quadrature_order)
    m = max(run.count, run.n0 + 1)
    spectrum = solve_lowest(system, m, tol=run.tol, seed=run.seed,
                            preconditioner=run.preconditioner,
                            dense_limit=run.dense_limit)

    table = {'n': [p.index for p in spectrum.pairs],
             'lambda': list(spectrum.eigenvalues),
             'residual': [p.residual for p in spectrum.pairs]}
    if run.polygon is None and cfg.at_origin:
        oracle = disk_spectrum(run.alpha, m).lambdas / run.radius ** 2
        table['oracle'] = list(oracle)
        table['rel_error'] = list(np.abs(spectrum.eigenvalues - oracle)
                                  / oracle)
    write_csv(table, config.path('eigenvalues.csv'))

    summary = ['alpha = %s' % format_float(run.alpha),
               'pole = %s, %s' % (format_float(cfg.pole[0]),
                                  format_float(cfg.pole[1])),
               'vertices = %d' % mesh.n_vertices,
               'dofs = %d' % system.dim,
               'm_orthogonality = %s'
               % format_float(m_orthogonality_defect(spectrum, system))]
    if not check_simplicity(spectrum, run.n0):
        write_lines(summary + ['simple = no'], config.path('summary.txt'))
        raise SimplicityError('lambda_%d is not simple: gaps %s'
                              % (run.n0, spectrum.gaps(run.n0)),
                              cfg.abs_pole)
    pair = spectrum[run.n0]
    dump_eigenpair(pair, config.path('eigenpair_%d.dat' % run.n0))

    ft, betas, vanishing = pole_diagnostics(mesh, pair.nodal(), cfg, pair.lam,
                                            run)
    write_csv({'j': betas.modes,
               'beta_re': [betas.beta(j).real for j in betas.modes],
               'beta_im': [betas.beta(j).imag for j in betas.modes],
               'beta_abs': [abs(betas.beta(j)) for j in betas.modes],
               'spread': [betas[j].spread for j in betas.modes],
               'negligible': [int(betas[j].negligible) for j in betas.modes],
               'resolved': [int(betas[j].resolved) for j in betas.modes]},
              config.path('betas.csv'))
    checks = inequality_checks(system, pair.vector, run.Q,
                               run.quadrature_order)
    summary += ['lambda = %s' % format_float(pair.lam),
                'k = %d' % vanishing.k,
                'vanishing_order = %s' % format_float(vanishing.order),
                'loglog_slope = %s' % format_float(vanishing.slope),
                'hardy_ratio = %s' % format_float(checks.hardy_ratio),
                'hardy = %s' % _verdict(checks.hardy_passed),
                'poincare = %s' % ('SKIP' if checks.poincare is None
                                   else _verdict(checks.poincare_passed))]

    radii = _almgren_radii(mesh, cfg)
    if radii is not None:
        curve = frequency_curve(mesh, pair.nodal(), pair.lam, cfg, radii,
                                Q=run.Q, order=run.quadrature_order)
        write_csv({'r': curve.radii, 'H': curve.H, 'E': curve.E,
                   'N': curve.N}, config.path('almgren.csv'))
        if run.emit_plots:
            write_dat(curve.radii, curve.N, config.path('almgren_N.dat'),
                      'r N')
            write_dat(curve.radii, curve.H, config.path('almgren_H.dat'),
                      'r H')
    else:
        logger.warning('pole too far from the origin for an Almgren curve')
    if run.emit_plots:
        write_dat(ft.radii, np.abs(ft.mode(vanishing.k)),
                  config.path('mode_%d.dat' % vanishing.k), 'r |v_k|')
    write_lines(summary, config.path('summary.txt'))
    print(config.experiment_path)
    return 0


def cmd_sweep(args, run):
    """Full pole sweep with the limit profile and the invariant verdicts."""
    if len(run.a_list) < MIN_FIT_SAMPLES:
        raise RateFitError('a sweep needs at least %d values of |a|, got %d'
                           % (MIN_FIT_SAMPLES, len(run.a_list)))
    config = Config('sweep', run.output)
    domain = build_domain(run)
    reference = reference_state(domain, run)
    profile = solve_limit_profile(run.alpha, reference.k, run.profile_S,
                                  run.profile_h_max, run.profile_n_boundary,
                                  verify_doubling=run.verify_doubling)
    radii = [r for r in run.limit_radii if r <= 0.5 * profile.S]
    limit = limit_constant(profile, radii) if radii else None
    report = pole_sweep(domain, run, reference, profile)
    results = evaluate_invariants(report, profile, limit)

    write_csv(report.to_frame(), config.path('sweep.csv'))
    write_csv(report.diagnostics_frame(), config.path('sweep_diagnostics.csv'))
    ratios, c0 = pole_term_ratio(report)
    write_lines([str(r) for r in results], config.path('invariants.txt'))
    write_lines(['alpha = %s' % format_float(run.alpha),
                 'direction = %s' % format_float(run.direction),
                 'lambda_0 = %s' % format_float(report.lam0),
                 'k = %d' % reference.k,
                 'order = %s' % format_float(report.order),
                 'K = %s' % format_float(report.K),
                 'fitted_slope = %s' % format_float(report.fitted_slope),
                 'r_squared = %s' % format_float(report.r_squared),
                 'noise_floor = %s' % format_float(report.noise_floor),
                 'pole_term_c0 = %s' % format_float(c0),
                 'profile_tail = %s' % format_float(profile.tail),
                 'limit_L = %s' % format_float(limit.L if limit else math.nan),
                 'passed = %d/%d' % (sum(r.passed for r in results),
                                     len(results))],
                config.path('summary.txt'))
    if run.emit_plots:
        frame = report.to_frame()
        write_dat(frame['abs_a'], np.abs(frame['diff']),
                  config.path('rate.dat'), '|a| |lambda_0 - lambda_a|')
        write_dat(frame['abs_a'], frame['blowup_dist'],
                  config.path('blowup.dat'), '|a| blow-up distance')
        write_dat(frame['abs_a'], frame['gap'], config.path('gap.dat'),
                  '|a| eigenfunction gap')
        write_dat(frame['abs_a'], [s.h_ratio for s in report.samples],
                  config.path('h_ratio.dat'), '|a| |a|^order/sqrt(H)')
        write_dat(frame['abs_a'], ratios, config.path('pole_term.dat'),
                  '|a| |M|/H')
        if limit is not None:
            write_dat(limit.radii, limit.F, config.path('limit_F.dat'), 'R F')
    for result in results:
        print(result)
    print(config.experiment_path)
    return 0


def cmd_profile(args, run):
    """Limit profile, F(R), its limit and the harmonic extension energy."""
    config = Config('profile', run.output)
    k = run.k if run.k is not None else (0 if run.alpha < 0.5 else 1)
    profile = solve_limit_profile(run.alpha, k, run.profile_S,
                                  run.profile_h_max, run.profile_n_boundary,
                                  verify_doubling=run.verify_doubling)
    radii = [r for r in run.limit_radii if r <= 0.5 * profile.S]
    if not radii:
        raise WindowError('no limit radius inside D_%g' % (0.5 * profile.S))
    limit = limit_constant(profile, radii)
    half = 0.5 * profile.S
    extension = solve_harmonic_extension(profile, half)
    write_csv({'R': limit.radii, 'F': limit.F}, config.path('profile_F.csv'))
    lines = ['alpha = %s' % format_float(run.alpha),
             'k = %d' % k,
             'S = %s' % format_float(profile.S),
             'vertices = %d' % profile.mesh.n_vertices,
             'tail = %s' % format_float(profile.tail),
             'far_field_error = %s' % format_float(
                 profile.far_field_error(half)),
             'L = %s' % format_float(limit.L),
             'tail_increment = %s' % format_float(limit.tail_increment),
             'harmonic_extension_energy = %s' % format_float(
                 extension.energy)]
    if profile.doubling_defect is not None:
        lines.append('doubling_defect = %s'
                     % format_float(profile.doubling_defect))
    write_lines(lines, config.path('summary.txt'))
    if run.emit_plots:
        write_dat(limit.radii, limit.F, config.path('limit_F.dat'), 'R F')
    print(config.experiment_path)
    return 0


def cmd_mesh(args, run):
    """Write the mesh (and optionally the matrices) for one pole."""
    config = Config('mesh', run.output)
    domain = build_domain(run)
    cfg = _pole_config(run)
    mesh = mesh_domain(domain, cfg.pole, run.h_max, run.grading_exponent,
                       run.h_min_floor)
    write_mesh(mesh, config.path('mesh.abmesh'))
    quality = mesh_quality(mesh)
    lines = ['vertices = %d' % mesh.n_vertices,
             'triangles = %d' % mesh.n_triangles,
             'min_quality = %s' % format_float(quality.min()),
             'min_diameter = %s' % format_float(mesh.diameters.min())]
    if args.matrices:
        system = assemble(mesh, cfg, run.quadrature_order)
        dump_matrix(system.stiffness, config.path('stiffness.txt'))
        dump_matrix(system.mass, config.path('mass.txt'))
        lines.append('dofs = %d' % system.dim)
    write_lines(lines, config.path('summary.txt'))
    print(config.experiment_path)
    return 0


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        run = run_config(args)
        if args.log_level or args.config:
            set_log_level(run.log_level)
        return args.handler(args, run)
    except AbspecError as err:
        logger.error('%s: %s', type(err).__name__, err)
        return err.exit_code


if __name__ == '__main__':
    sys.exit(main())
