"""Run a battery of pole sweeps (alpha list x direction list) and collect
their invariant verdicts in one CSV."""
import argparse
import os

from abspec.asymptotics import (evaluate_invariants, limit_constant,
                                pole_sweep, reference_state,
                                solve_limit_profile)
from abspec.cli import build_domain
from abspec.utils.common import (LOG_FMT, LOG_LEVEL_MAIN, Logger, write_csv)
from abspec.utils.config import Config, RunConfig
from abspec.utils.errors import AbspecError

logger = Logger().getLogger('ABSPEC_BATTERY', LOG_LEVEL_MAIN, LOG_FMT)

#--------------------------------BATTERY ARGUMENTS DEFINITION---------------------------------#
parser = argparse.ArgumentParser()
parser.add_argument(
    '--alphas',
    '-al',
    type=str,
    default='0.3,0.7',
    dest='alphas',
    help='Comma separated circulations of the battery.')
parser.add_argument(
    '--directions',
    '-dir',
    type=str,
    default='0.0',
    dest='directions',
    help='Comma separated sweep direction angles.')
parser.add_argument(
    '--config',
    '-c',
    type=str,
    default=None,
    dest='config',
    help='Base key = value configuration file shared by every sweep.')
parser.add_argument(
    '--output',
    '-o',
    type=str,
    default=None,
    dest='output',
    help='Directory of the battery (a numbered folder by default).')
parser.add_argument(
    '--jobs',
    '-j',
    type=int,
    default=1,
    dest='jobs',
    help='Sweep samples solved concurrently inside each sweep.')
args = parser.parse_args()
#---------------------------------------------------------------------------------------------#

base = RunConfig.from_file(args.config) if args.config else RunConfig()
config = Config('battery', args.output)
rows = []
for alpha in (float(a) for a in args.alphas.split(',')):
    for direction in (float(d) for d in args.directions.split(',')):
        name = 'alpha_%g-dir_%g' % (alpha, direction)
        run = base.merged({'alpha': alpha, 'direction': direction,
                           'jobs': args.jobs}).validate()
        logger.info('battery sweep %s', name)
        try:
            domain = build_domain(run)
            reference = reference_state(domain, run)
            profile = solve_limit_profile(alpha, reference.k, run.profile_S,
                                          run.profile_h_max,
                                          run.profile_n_boundary)
            radii = [r for r in run.limit_radii if r <= 0.5 * profile.S]
            limit = limit_constant(profile, radii) if radii else None
            report = pole_sweep(domain, run, reference, profile)
            results = evaluate_invariants(report, profile, limit)
        except AbspecError as err:
            logger.error('sweep %s failed: %s', name, err)
            rows.append({'sweep': name, 'alpha': alpha,
                         'direction': direction, 'invariant': 'run',
                         'passed': 0, 'measured': float('nan')})
            continue
        write_csv(report.to_frame(), os.path.join(config.experiment_path,
                                                  name + '.csv'))
        for result in results:
            rows.append({'sweep': name, 'alpha': alpha,
                         'direction': direction, 'invariant': result.name,
                         'passed': int(result.passed),
                         'measured': result.measured})

write_csv(rows, config.path('battery.csv'))
print(config.experiment_path)
