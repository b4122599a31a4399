from harness.selftest import run_selftest
from schemas.experiment_schemas import SelftestDTO
from shared.base_usecase import BaseUC


class SelftestUC(BaseUC):
    """Built-in property checks; fails on the first broken property"""
    ReqDTO = SelftestDTO

    def process_request(self, req) -> list[dict] | None:
        results = run_selftest(req.seed, req.grad_points)
        failed = [result for result in results if not result.passed]
        if failed:
            self.add_error(error_type='selftest_failure', message=f'{failed[0].name}: {failed[0].detail}',
                           exit_code=1)
            return
        return [{'property': result.name, 'passed': result.passed, 'detail': result.detail} for result in results]
