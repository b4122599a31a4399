import logging
import traceback
from abc import abstractmethod

from config import DEBUG
from shared.base_input_dto import BaseDTO
from shared.error_structure import Error
from shared.exceptions import FsvcException


logger = logging.getLogger(__name__)


class ResponseFailure:
    def __init__(self, errors, exit_code: int = 1):
        self.__errors = errors
        self.__exit_code = exit_code

    @property
    def exit_code(self) -> int:
        return self.__exit_code

    @property
    def errors(self) -> list[dict]:
        return [x.dict for x in self.__errors]

    @property
    def messages(self) -> list[str]:
        return [str(x) for x in self.__errors]

    def __bool__(self) -> bool:
        return False


class ResponseSuccess:
    def __init__(self, data):
        self.data = data

    def __bool__(self) -> bool:
        return True


class BaseUC:
    """Base class for command use cases and their errors"""
    ReqDTO: BaseDTO = BaseDTO
    Error: Error = Error

    def __init__(self, input_data: dict):
        self.__exit_code: int = 1
        self.__errors: list[Error] = []
        self.__input_data = self.ReqDTO(input_data)

    def exec(self) -> ResponseSuccess | ResponseFailure:
        return self.__handler()

    def __handler(self) -> ResponseSuccess | ResponseFailure:

        if self.__input_data.has_errors:
            return ResponseFailure(errors=self.__input_data.get_result(), exit_code=2)

        try:
            success_response = self.process_request(self.__input_data)
        except FsvcException as exc:
            logger.debug('command failed', exc_info=True)
            return ResponseFailure(errors=[exc.as_error()], exit_code=1)
        except Exception as exc:
            if DEBUG:
                traceback.print_exc(limit=7)
            message = exc.message if hasattr(exc, 'message') else str(exc)
            error = self.Error(error_type='system_error', message=message)
            return ResponseFailure(errors=[error], exit_code=1)

        if self.__errors:
            return ResponseFailure(errors=self.__errors, exit_code=self.__exit_code)

        return ResponseSuccess(data=success_response)

    def add_error(self, *args, **kwargs):
        """Adding a new error object to error storage"""
        exit_code = kwargs.get('exit_code', None)
        if exit_code is not None and isinstance(exit_code, int):
            self.__exit_code = exit_code
        self.__errors.append(Error(*args, **kwargs))

    @abstractmethod
    def process_request(self, req_dto):
        pass
